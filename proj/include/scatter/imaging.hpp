#ifndef SCATTER_IMAGING_HPP
#define SCATTER_IMAGING_HPP

#include "scatter/data.hpp"
#include "scatter/geometry.hpp"

namespace scatter::imaging {

struct Provenance {
    std::string indicator;
    double k = 0.0;
    Vec2 z0{0.0, 0.0};
    bool has_z0 = false;
};

struct IndicatorField {
    geometry::SamplingGrid grid;
    std::vector<double> values;  // one per lattice point, >= 0, finite
    Provenance provenance;
};

// Phaseless sampling indicator: at each z the modulus of the weighted triple
// sum of tensor entries against e^{ik(z-z0).d_j} e^{-ik(z-z0).d_l}. The
// diagonal l = j is excluded unless include_diagonal is set. Cost per point
// is O(N^2) after the observation index is summed out once.
IndicatorField indicator_phaseless(const data::PhaselessTensor& pt,
                                   const geometry::SamplingGrid& grid,
                                   bool include_diagonal = false);

// The three-part split of the full-range indicator: a term peaking on the
// obstacle boundary, its point reflection through z0, and the Bessel-carried
// reference-point term. |boundary + mirror + center| reproduces
// indicator_phaseless with the diagonal included.
struct IndicatorDecomposition {
    geometry::SamplingGrid grid;
    std::vector<double> boundary_term;  // >= 0
    std::vector<double> mirror_term;    // >= 0
    std::vector<double> center_term;    // signed
};

IndicatorDecomposition indicator_decomposition(const forward::FarFieldMatrix& ff_z0,
                                               const geometry::SamplingGrid& grid,
                                               const Vec2& z0);

IndicatorField combined_decomposition_field(const IndicatorDecomposition& dec);

// Full-data comparator: (2pi/M)(2pi/N) sum_j | sum_i ff(i,j) e^{ikz.x_i} |^2
// for a plain (unshifted) far-field matrix.
IndicatorField indicator_fulldata(const forward::FarFieldMatrix& ff,
                                  const geometry::SamplingGrid& grid);

// Relative size of the imaginary part of the inner sum at z, before the
// modulus; (j,l)-symmetric tensors give an essentially real sum. Checks both
// diagonal conventions and reports the larger residual.
double realness_check(const data::PhaselessTensor& pt, const Vec2& z);

}  // namespace scatter::imaging

#endif
