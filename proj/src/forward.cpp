#include "scatter/forward.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "scatter/specfun.hpp"

namespace scatter::forward {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

constexpr double kEulerGamma = std::numbers::egamma;
constexpr double kRcondFloor = 1e-12;
const Complex kImag{0.0, 1.0};

// Per-obstacle Nystrom data at the 2m equispaced parameter nodes.
struct Panel {
    int n;                        // node count 2m
    int m;                        // half count
    std::vector<double> t;        // parameters
    std::vector<Vec2> x;          // boundary points
    std::vector<Vec2> dx;         // tangents
    std::vector<Vec2> ddx;        // second derivatives
    std::vector<double> jac;      // |dx|
    std::vector<Vec2> nrm;        // (dx2, -dx1), carries the Jacobian
    std::vector<Complex> rho;     // impedance values at nodes (if any)
    const Obstacle* obstacle = nullptr;
    int offset = 0;               // first unknown index in the global system
    int dof = 0;                  // n for Dirichlet/impedance, 2n for transmission
};

Panel discretize(const Obstacle& ob, int node_count) {
    Panel p;
    p.n = node_count;
    p.m = node_count / 2;
    p.t.resize(p.n);
    p.x.resize(p.n);
    p.dx.resize(p.n);
    p.ddx.resize(p.n);
    p.jac.resize(p.n);
    p.nrm.resize(p.n);
    for (int i = 0; i < p.n; ++i) {
        double t = kPi * i / p.m;
        p.t[i] = t;
        p.x[i] = ob.curve.point(t);
        p.dx[i] = ob.curve.tangent(t);
        p.ddx[i] = ob.curve.second_derivative(t);
        p.jac[i] = p.dx[i].norm();
        p.nrm[i] = Vec2(p.dx[i].y(), -p.dx[i].x());
    }
    if (ob.bc.kind == BoundaryKind::Impedance) {
        p.rho.resize(p.n);
        for (int i = 0; i < p.n; ++i) p.rho[i] = ob.bc.rho(p.t[i]);
    }
    p.obstacle = &ob;
    return p;
}

// Single- and double-layer boundary operators on one panel at wavenumber
// kappa, discretized with the logarithmic-kernel splitting. Returns the
// S and K operator matrices applied to nodal densities.
struct PanelOperators {
    MatrixXcd single;  // S
    MatrixXcd dbl;     // K
};

PanelOperators panel_operators(const Panel& p, double kappa) {
    const int n = p.n;
    const double h = kPi / p.m;
    std::vector<double> R = log_quadrature_weights(p.m);
    PanelOperators ops{MatrixXcd(n, n), MatrixXcd(n, n)};
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) {
                double jc = p.jac[i];
                double m1 = -jc / (4.0 * kPi);
                Complex m2 = jc * (0.25 * kImag -
                                   (std::log(0.5 * kappa * jc) + kEulerGamma) / kTwoPi);
                ops.single(i, i) = R[0] * m1 + h * m2;
                double curv = p.dx[i].x() * p.ddx[i].y() - p.dx[i].y() * p.ddx[i].x();
                Complex l2 = -curv / (4.0 * kPi * jc * jc);
                ops.dbl(i, i) = h * l2;  // L1 vanishes on the diagonal
                continue;
            }
            Vec2 d = p.x[i] - p.x[j];
            double r = d.norm();
            double lnterm = std::log(4.0 * std::pow(std::sin(0.5 * (p.t[i] - p.t[j])), 2));
            int l = std::abs(i - j);

            double m1 = -specfun::bessel_j0(kappa * r) * p.jac[j] / (4.0 * kPi);
            Complex mfull = 0.25 * kImag * specfun::hankel1_0(kappa * r) * p.jac[j];
            ops.single(i, j) = R[l] * m1 + h * (mfull - m1 * lnterm);

            double g = d.dot(p.nrm[j]);
            double l1 = -kappa * specfun::bessel_j1(kappa * r) * g / (4.0 * kPi * r);
            Complex lfull = 0.25 * kImag * kappa * specfun::hankel1_1(kappa * r) * g / r;
            ops.dbl(i, j) = R[l] * l1 + h * (lfull - l1 * lnterm);
        }
    }
    return ops;
}

// Exterior-wavenumber layer potentials of panel q evaluated at a point away
// from q; plain trapezoid weights since the kernels are smooth there.
struct CrossKernels {
    Complex single;  // (i/4) H0(k r) |y'| * h
    Complex dbl;     // (ik/4) H1(k r) ((x-y).n) / r * h
};

CrossKernels cross_kernels(const Panel& q, int j, const Vec2& x, double k) {
    const double h = kPi / q.m;
    Vec2 d = x - q.x[j];
    double r = d.norm();
    Complex sl = 0.25 * kImag * specfun::hankel1_0(k * r) * q.jac[j] * h;
    Complex dl = 0.25 * kImag * k * specfun::hankel1_1(k * r) * d.dot(q.nrm[j]) / r * h;
    return {sl, dl};
}

// Columns of obstacle q's exterior representation evaluated at point x,
// written into row `row` of A starting at q's offset.
void fill_cross_row(MatrixXcd& A, int row, const Panel& q, const Vec2& x, double k,
                    Complex sign) {
    for (int j = 0; j < q.n; ++j) {
        CrossKernels ck = cross_kernels(q, j, x, k);
        switch (q.obstacle->bc.kind) {
            case BoundaryKind::Dirichlet:
                A(row, q.offset + j) += sign * (ck.dbl - kImag * k * ck.single);
                break;
            case BoundaryKind::Impedance:
                A(row, q.offset + j) += sign * (ck.dbl + kImag * k * q.rho[j] * ck.single);
                break;
            case BoundaryKind::Transmission: {
                double lam = q.obstacle->bc.transmission_lambda;
                A(row, q.offset + j) += sign * ck.dbl;
                A(row, q.offset + q.n + j) += sign * (-lam * ck.single);
                break;
            }
        }
    }
}

void check_disjoint(const std::vector<Panel>& panels) {
    for (std::size_t p = 0; p < panels.size(); ++p) {
        for (std::size_t q = p + 1; q < panels.size(); ++q) {
            double dmin = std::numeric_limits<double>::infinity();
            for (const Vec2& a : panels[p].x)
                for (const Vec2& b : panels[q].x) dmin = std::min(dmin, (a - b).norm());
            if (dmin < 1e-6)
                throw std::runtime_error("solve_farfield: obstacles '" +
                                         panels[p].obstacle->curve.label() + "' and '" +
                                         panels[q].obstacle->curve.label() +
                                         "' touch or overlap");
            // Containment guard: winding of one center around the other curve.
            for (auto [a, b] : {std::pair{&panels[p], &panels[q]},
                                std::pair{&panels[q], &panels[p]}}) {
                const Vec2 c = b->obstacle->curve.center();
                double winding = 0.0;
                for (int i = 0; i < a->n; ++i) {
                    Vec2 u = a->x[i] - c;
                    Vec2 v = a->x[(i + 1) % a->n] - c;
                    winding += std::atan2(u.x() * v.y() - u.y() * v.x(), u.dot(v));
                }
                if (std::abs(winding) > kPi)
                    throw std::runtime_error(
                        "solve_farfield: obstacle '" + b->obstacle->curve.label() +
                        "' lies inside '" + a->obstacle->curve.label() + "'");
            }
        }
    }
}

// Assembles the coupled boundary system and factors it once. Dirichlet
// obstacles use the combined double/single layer ansatz with coupling k;
// impedance and transmission obstacles carry their physical traces as
// unknowns, with the interior Green identity closing the transmission pair.
struct Assembled {
    std::vector<Panel> panels;
    Eigen::PartialPivLU<MatrixXcd> lu;
    int total_dof = 0;
};

Assembled assemble(std::span<const Obstacle> obstacles, double k, int node_count) {
    if (!(k > 0.0)) throw std::domain_error("solve_farfield: wavenumber must be positive");
    if (node_count < 16 || node_count % 2 != 0)
        throw std::domain_error("solve_farfield: node count must be even and >= 16");
    if (obstacles.empty()) throw std::domain_error("solve_farfield: no obstacles");

    Assembled as;
    int offset = 0;
    for (const Obstacle& ob : obstacles) {
        Panel p = discretize(ob, node_count);
        p.offset = offset;
        p.dof = (ob.bc.kind == BoundaryKind::Transmission) ? 2 * p.n : p.n;
        offset += p.dof;
        as.panels.push_back(std::move(p));
    }
    as.total_dof = offset;
    check_disjoint(as.panels);

    MatrixXcd A = MatrixXcd::Zero(offset, offset);
    for (const Panel& p : as.panels) {
        switch (p.obstacle->bc.kind) {
            case BoundaryKind::Dirichlet: {
                PanelOperators ops = panel_operators(p, k);
                auto blk = A.block(p.offset, p.offset, p.n, p.n);
                blk = ops.dbl - kImag * k * ops.single;
                blk.diagonal().array() += 0.5;
                break;
            }
            case BoundaryKind::Impedance: {
                PanelOperators ops = panel_operators(p, k);
                auto blk = A.block(p.offset, p.offset, p.n, p.n);
                blk = -ops.dbl;
                for (int j = 0; j < p.n; ++j)
                    blk.col(j) -= kImag * k * p.rho[j] * ops.single.col(j);
                blk.diagonal().array() += 0.5;
                break;
            }
            case BoundaryKind::Transmission: {
                double ki = k * std::sqrt(p.obstacle->bc.refractive_index);
                double lam = p.obstacle->bc.transmission_lambda;
                PanelOperators ext = panel_operators(p, k);
                PanelOperators in = panel_operators(p, ki);
                auto tl = A.block(p.offset, p.offset, p.n, p.n);
                tl = -ext.dbl;
                tl.diagonal().array() += 0.5;
                A.block(p.offset, p.offset + p.n, p.n, p.n) = lam * ext.single;
                auto bl = A.block(p.offset + p.n, p.offset, p.n, p.n);
                bl = in.dbl;
                bl.diagonal().array() += 0.5;
                A.block(p.offset + p.n, p.offset + p.n, p.n, p.n) = -in.single;
                break;
            }
        }
        // Coupling to the other obstacles' exterior fields.
        for (const Panel& q : as.panels) {
            if (&q == &p) continue;
            Complex sign =
                (p.obstacle->bc.kind == BoundaryKind::Dirichlet) ? Complex(1.0) : Complex(-1.0);
            for (int i = 0; i < p.n; ++i)
                fill_cross_row(A, p.offset + i, q, p.x[i], k, sign);
        }
    }

    as.lu.compute(A);
    double rc = as.lu.rcond();
    if (!(rc > kRcondFloor))
        throw ResonanceError("boundary system ill-conditioned at k = " + std::to_string(k) +
                             " (rcond " + std::to_string(rc) + "); likely an interior resonance");
    return as;
}

void incident_rhs(const Assembled& as, const IncidentField& ui, int col, MatrixXcd& rhs) {
    for (const Panel& p : as.panels) {
        double sgn = (p.obstacle->bc.kind == BoundaryKind::Dirichlet) ? -1.0 : 1.0;
        for (int i = 0; i < p.n; ++i) rhs(p.offset + i, col) = sgn * ui(p.x[i]);
        if (p.obstacle->bc.kind == BoundaryKind::Transmission)
            for (int i = 0; i < p.n; ++i) rhs(p.offset + p.n + i, col) = 0.0;
    }
}

// Far-field functional: row per observation direction applied to the stacked
// densities, with the 2D radiation normalization e^{i pi/4}/sqrt(8 pi k).
MatrixXcd farfield_rows(const Assembled& as, double k, const geometry::DirectionSet& obs) {
    Complex c0 = std::exp(kImag * kPi / 4.0) / std::sqrt(8.0 * kPi * k);
    MatrixXcd F = MatrixXcd::Zero(obs.count, as.total_dof);
    for (int i = 0; i < obs.count; ++i) {
        Vec2 xh = obs.direction(i);
        for (const Panel& p : as.panels) {
            double h = kPi / p.m;
            for (int j = 0; j < p.n; ++j) {
                Complex phase = std::exp(-kImag * k * xh.dot(p.x[j]));
                Complex dl = -kImag * k * xh.dot(p.nrm[j]) * phase * h;
                Complex sl = p.jac[j] * phase * h;
                switch (p.obstacle->bc.kind) {
                    case BoundaryKind::Dirichlet:
                        F(i, p.offset + j) = c0 * (dl - kImag * k * sl);
                        break;
                    case BoundaryKind::Impedance:
                        F(i, p.offset + j) = c0 * (dl + kImag * k * p.rho[j] * sl);
                        break;
                    case BoundaryKind::Transmission: {
                        double lam = p.obstacle->bc.transmission_lambda;
                        F(i, p.offset + j) = c0 * dl;
                        F(i, p.offset + p.n + j) = c0 * (-lam * sl);
                        break;
                    }
                }
            }
        }
    }
    return F;
}

void validate_bc(std::span<const Obstacle> obstacles) {
    for (const Obstacle& ob : obstacles) {
        const BoundaryCondition& bc = ob.bc;
        if (bc.kind == BoundaryKind::Impedance && !bc.rho)
            throw std::domain_error("impedance obstacle without a coefficient");
        if (bc.kind == BoundaryKind::Transmission &&
            (!(bc.refractive_index > 0.0) || !(bc.transmission_lambda > 0.0)))
            throw std::domain_error("transmission requires n > 0 and lambda > 0");
    }
}

}  // namespace

BoundaryCondition BoundaryCondition::dirichlet() { return {}; }

BoundaryCondition BoundaryCondition::impedance(std::function<Complex(double)> rho) {
    BoundaryCondition bc;
    bc.kind = BoundaryKind::Impedance;
    bc.rho = std::move(rho);
    return bc;
}

BoundaryCondition BoundaryCondition::impedance_constant(Complex rho) {
    return impedance([rho](double) { return rho; });
}

BoundaryCondition BoundaryCondition::neumann() { return impedance_constant(0.0); }

BoundaryCondition BoundaryCondition::transmission(double n, double lambda) {
    if (!(n > 0.0) || !(lambda > 0.0))
        throw std::domain_error("transmission requires n > 0 and lambda > 0");
    BoundaryCondition bc;
    bc.kind = BoundaryKind::Transmission;
    bc.refractive_index = n;
    bc.transmission_lambda = lambda;
    return bc;
}

FarFieldMatrix solve_farfield(std::span<const Obstacle> obstacles, double k,
                              const geometry::DirectionSet& obs,
                              const geometry::DirectionSet& inc, int node_count) {
    validate_bc(obstacles);
    Assembled as = assemble(obstacles, k, node_count);
    MatrixXcd rhs(as.total_dof, inc.count);
    for (int c = 0; c < inc.count; ++c) {
        Vec2 d = inc.direction(c);
        auto ui = [k, d](const Vec2& x) { return std::exp(kImag * k * d.dot(x)); };
        incident_rhs(as, ui, c, rhs);
    }
    MatrixXcd dens = as.lu.solve(rhs);
    MatrixXcd F = farfield_rows(as, k, obs);
    FarFieldMatrix ff{k, obs, inc, F * dens};
    if (!ff.values.allFinite())
        throw std::runtime_error("solve_farfield: non-finite far-field entries");
    return ff;
}

MatrixXcd solve_farfield_incident(std::span<const Obstacle> obstacles, double k,
                                  const geometry::DirectionSet& obs,
                                  std::span<const IncidentField> incidents,
                                  int node_count) {
    validate_bc(obstacles);
    Assembled as = assemble(obstacles, k, node_count);
    MatrixXcd rhs(as.total_dof, static_cast<int>(incidents.size()));
    for (int c = 0; c < static_cast<int>(incidents.size()); ++c)
        incident_rhs(as, incidents[c], c, rhs);
    MatrixXcd dens = as.lu.solve(rhs);
    return farfield_rows(as, k, obs) * dens;
}

namespace {

// J_0..J_nmax by downward (Miller) recurrence, normalized with the Neumann
// identity J0 + 2 sum J_{2m} = 1. Stable for every argument we meet, in
// particular for interior wavenumbers smaller than the exterior one.
std::vector<double> bessel_j_sequence(int nmax, double z) {
    std::vector<double> j(nmax + 1, 0.0);
    if (z == 0.0) {
        j[0] = 1.0;
        return j;
    }
    int start = std::max(nmax, static_cast<int>(std::ceil(z))) + 40 +
                static_cast<int>(2.0 * std::sqrt(std::max<double>(nmax, z)));
    double jp1 = 0.0, jp = 1e-300;
    double norm = 0.0;
    for (int n = start; n >= 1; --n) {
        double jm = (2.0 * n / z) * jp - jp1;
        jp1 = jp;
        jp = jm;
        int idx = n - 1;
        if (idx <= nmax) j[idx] = jm;
        if (idx % 2 == 0 && idx > 0) norm += 2.0 * jm;
        if (std::abs(jp) > 1e250) {  // rescale to dodge overflow
            jp *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
            for (auto& v : j) v *= 1e-250;
        }
    }
    norm += j[0];
    for (auto& v : j) v /= norm;
    return j;
}

std::vector<double> bessel_y_sequence(int nmax, double z) {
    std::vector<double> y(nmax + 1);
    y[0] = specfun::bessel_y0(z);
    if (nmax >= 1) y[1] = specfun::bessel_y1(z);
    for (int n = 1; n < nmax; ++n) y[n + 1] = (2.0 * n / z) * y[n] - y[n - 1];
    return y;
}

double deriv(const std::vector<double>& f, int n, double z) {
    // f_n'(z) = f_{n-1}(z) - (n/z) f_n(z), with f_0' = -f_1.
    if (n == 0) return -f[1];
    return f[n - 1] - (n / z) * f[n];
}

}  // namespace

FarFieldMatrix analytic_circle_farfield(double radius, const Vec2& center,
                                        const BoundaryCondition& bc, double k,
                                        const geometry::DirectionSet& obs,
                                        const geometry::DirectionSet& inc,
                                        int series_terms) {
    if (!(radius > 0.0) || !(k > 0.0))
        throw std::domain_error("analytic_circle_farfield: need radius > 0, k > 0");
    if (series_terms < static_cast<int>(std::ceil(k * radius)) + 20)
        throw std::domain_error("analytic_circle_farfield: series_terms too small");

    const int T = series_terms;
    const double kr = k * radius;
    std::vector<double> je = bessel_j_sequence(T + 1, kr);
    std::vector<double> ye = bessel_y_sequence(T + 1, kr);

    Complex rho0;
    if (bc.kind == BoundaryKind::Impedance) {
        rho0 = bc.rho(0.0);
        for (double t : {1.0, 2.5, 4.0})
            if (std::abs(bc.rho(t) - rho0) > 1e-14 * (1.0 + std::abs(rho0)))
                throw std::domain_error(
                    "analytic_circle_farfield: only constant impedance supported");
    }

    std::vector<double> ji, yi;
    double ki = 0.0;
    if (bc.kind == BoundaryKind::Transmission) {
        ki = k * std::sqrt(bc.refractive_index);
        ji = bessel_j_sequence(T + 1, ki * radius);
    }

    std::vector<Complex> coeff(T + 1);
    for (int n = 0; n <= T; ++n) {
        double jn = je[n];
        Complex hn(je[n], ye[n]);
        double djn = deriv(je, n, kr);
        Complex dhn(djn, deriv(ye, n, kr));
        switch (bc.kind) {
            case BoundaryKind::Dirichlet:
                coeff[n] = -jn / hn;
                break;
            case BoundaryKind::Impedance:
                coeff[n] = -(djn + kImag * rho0 * jn) / (dhn + kImag * rho0 * hn);
                break;
            case BoundaryKind::Transmission: {
                double lam = bc.transmission_lambda;
                double jni = ji[n], djni = deriv(ji, n, ki * radius);
                Complex det = k * dhn * jni - lam * ki * hn * djni;
                coeff[n] = (lam * ki * jn * djni - k * djn * jni) / det;
                break;
            }
        }
    }

    Complex amp = std::exp(-kImag * kPi / 4.0) * std::sqrt(2.0 / (kPi * k));
    FarFieldMatrix ff{k, obs, inc, Eigen::MatrixXcd(obs.count, inc.count)};
    for (int i = 0; i < obs.count; ++i) {
        for (int j = 0; j < inc.count; ++j) {
            double dtheta = obs.angle(i) - inc.angle(j);
            Complex s = coeff[0];
            for (int n = 1; n <= T; ++n) s += 2.0 * coeff[n] * std::cos(n * dtheta);
            Complex shift =
                std::exp(kImag * k * (inc.direction(j) - obs.direction(i)).dot(center));
            ff.values(i, j) = amp * s * shift;
        }
    }
    return ff;
}

std::vector<double> log_quadrature_weights(int half_node_count) {
    const int m = half_node_count;
    if (m < 1) throw std::domain_error("log_quadrature_weights: need m >= 1");
    std::vector<double> r(2 * m);
    for (int l = 0; l < 2 * m; ++l) {
        double s = 0.0;
        for (int p = 1; p < m; ++p) s += std::cos(p * l * kPi / m) / p;
        r[l] = -(kTwoPi / m) * s - ((l % 2 == 0) ? 1.0 : -1.0) * kPi / (m * m);
    }
    return r;
}

double check_reciprocity(const FarFieldMatrix& ff) {
    if (ff.obs.count != ff.inc.count)
        throw std::domain_error("check_reciprocity: observation and incident sets differ");
    int n = ff.obs.count;
    if (n % 2 != 0)
        throw std::domain_error("check_reciprocity: need an even direction count");
    int h = n / 2;
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            worst = std::max(worst,
                             std::abs(ff.values(i, j) - ff.values((j + h) % n, (i + h) % n)));
    return worst;
}

}  // namespace scatter::forward
