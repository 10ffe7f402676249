#ifndef SCATTER_FORWARD_HPP
#define SCATTER_FORWARD_HPP

#include <span>
#include <vector>

#include "scatter/geometry.hpp"

namespace scatter::forward {

enum class BoundaryKind { Dirichlet, Impedance, Transmission };

// Dirichlet | Impedance(rho) | Transmission(n, lambda). The impedance
// coefficient is a function of the boundary parameter; every catalogued
// experiment uses a real constant or a low-order sinusoid in t.
struct BoundaryCondition {
    BoundaryKind kind = BoundaryKind::Dirichlet;
    std::function<Complex(double)> rho;  // Impedance only
    double refractive_index = 1.0;       // Transmission: n > 0
    double transmission_lambda = 1.0;    // Transmission: lambda > 0

    static BoundaryCondition dirichlet();
    static BoundaryCondition impedance(std::function<Complex(double)> rho);
    static BoundaryCondition impedance_constant(Complex rho);
    static BoundaryCondition neumann();  // impedance with rho = 0
    static BoundaryCondition transmission(double n, double lambda);
};

struct Obstacle {
    geometry::ParametricCurve curve;
    BoundaryCondition bc;
};

struct FarFieldMatrix {
    double k = 0.0;
    geometry::DirectionSet obs;  // M observation directions x_i
    geometry::DirectionSet inc;  // N incident directions d_j
    Eigen::MatrixXcd values;     // M x N, entry (i,j) = far field (x_i; d_j)
    Vec2 z0{0.0, 0.0};           // reference point baked into the phases
};

// Far-field pattern of the scattering of plane waves e^{ik d_j . x} off the
// given obstacles, observed along obs. One dense system is assembled and
// factored per call; all incident directions share the factorization.
// node_count is the per-obstacle quadrature node count (even, >= 16).
FarFieldMatrix solve_farfield(std::span<const Obstacle> obstacles, double k,
                              const geometry::DirectionSet& obs,
                              const geometry::DirectionSet& inc, int node_count);

// Same solver with arbitrary incident fields in place of plane waves. Column
// c of the result corresponds to incidents[c]; each incident must solve the
// Helmholtz equation near the obstacles (plane waves, shifted plane waves,
// superpositions).
using IncidentField = std::function<Complex(const Vec2&)>;
Eigen::MatrixXcd solve_farfield_incident(std::span<const Obstacle> obstacles, double k,
                                         const geometry::DirectionSet& obs,
                                         std::span<const IncidentField> incidents,
                                         int node_count);

// Separation-of-variables reference solution for a single circle with
// constant-coefficient boundary condition. Center offsets enter through the
// plane-wave phase shift.
FarFieldMatrix analytic_circle_farfield(double radius, const Vec2& center,
                                        const BoundaryCondition& bc, double k,
                                        const geometry::DirectionSet& obs,
                                        const geometry::DirectionSet& inc,
                                        int series_terms);

// Max over (i,j) of |ff(x_i; d_j) - ff(-d_j; -x_i)|. Requires obs == inc
// uniform with even count so every antipode is in the set.
double check_reciprocity(const FarFieldMatrix& ff);

// Quadrature weights R_l for the periodic logarithmic kernel: with 2m nodes
// t_i = i*pi/m, sum_j R_{|i-j|} f(t_j) integrates ln(4 sin^2((t_i-t)/2)) f(t)
// exactly for trigonometric polynomials of degree below m.
std::vector<double> log_quadrature_weights(int half_node_count);

}  // namespace scatter::forward

#endif
