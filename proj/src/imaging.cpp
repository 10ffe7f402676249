#include "scatter/imaging.hpp"

#include <cmath>
#include <iostream>

#include "scatter/specfun.hpp"

namespace scatter::imaging {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;

const Complex kImag{0.0, 1.0};
constexpr std::size_t kChunk = 2048;

void require_metadata(double k) {
    if (!(k > 0.0))
        throw std::invalid_argument("indicator: dataset carries no positive wavenumber");
}

// The direction sums behave like trapezoid rules for e^{ik(z-z0).d}; they
// stop resolving the integrand once k|z-z0| outgrows the direction count,
// and the indicator fills with aliasing arcs.
void warn_if_undersampled(const geometry::SamplingGrid& grid, const Vec2& z0, double k,
                          int count) {
    double reach = 0.0;
    for (double x : {grid.ax, grid.bx})
        for (double y : {grid.ay, grid.by})
            reach = std::max(reach, (Vec2(x, y) - z0).norm());
    double need = k * reach;
    if (count < need + 4.0 * std::cbrt(std::max(need, 1.0)))
        std::cerr << "warning: " << count
                  << " incident directions under-resolve k|z-z0| up to " << need
                  << "; expect aliasing artifacts in the indicator\n";
}

void check_field(const IndicatorField& f) {
    for (double v : f.values)
        if (!std::isfinite(v))
            throw std::runtime_error("indicator produced a non-finite value");
}

// Phase table E(r, j) = exp(i k (z_r - z0) . d_j) for a block of lattice
// points starting at flat index `base`.
MatrixXcd phase_block(const geometry::SamplingGrid& grid, std::size_t base,
                      std::size_t rows, double k, const Vec2& z0,
                      const geometry::DirectionSet& dirs, double sign) {
    MatrixXcd e(rows, dirs.count);
    for (std::size_t r = 0; r < rows; ++r) {
        Vec2 dz = grid.point(base + r) - z0;
        for (int j = 0; j < dirs.count; ++j)
            e(static_cast<int>(r), j) = std::exp(kImag * (sign * k * dz.dot(dirs.direction(j))));
    }
    return e;
}

}  // namespace

IndicatorField indicator_phaseless(const data::PhaselessTensor& pt,
                                   const geometry::SamplingGrid& grid,
                                   bool include_diagonal) {
    require_metadata(pt.k);
    const int N = pt.inc_count;
    const auto dirs = geometry::uniform_directions(N);
    warn_if_undersampled(grid, pt.z0, pt.k, N);

    // Sum out the observation index once; the phases do not depend on it.
    MatrixXd c = MatrixXd::Zero(N, N);
    for (int i = 0; i < pt.obs_count; ++i)
        for (int j = 0; j < N; ++j)
            for (int l = 0; l < N; ++l) c(j, l) += pt.at(i, j, l);
    double diag_sum = c.diagonal().sum();
    MatrixXcd cc = c.cast<Complex>();

    const double w = (kTwoPi / pt.obs_count) * std::pow(kTwoPi / N, 2);
    IndicatorField field{grid, std::vector<double>(grid.size()),
                         {"phaseless", pt.k, pt.z0, true}};

    std::size_t blocks = (grid.size() + kChunk - 1) / kChunk;
    parallel_for(blocks, [&](std::size_t b) {
        std::size_t base = b * kChunk;
        std::size_t rows = std::min(kChunk, grid.size() - base);
        MatrixXcd e = phase_block(grid, base, rows, pt.k, pt.z0, dirs, +1.0);
        MatrixXcd ec = e * cc;
        for (std::size_t r = 0; r < rows; ++r) {
            Complex s = ec.row(static_cast<int>(r))
                            .cwiseProduct(e.row(static_cast<int>(r)).conjugate())
                            .sum();
            if (!include_diagonal) s -= diag_sum;  // e_j conj(e_j) = 1
            field.values[base + r] = w * std::abs(s);
        }
    });
    check_field(field);
    return field;
}

IndicatorDecomposition indicator_decomposition(const forward::FarFieldMatrix& ff_z0,
                                               const geometry::SamplingGrid& grid,
                                               const Vec2& z0) {
    require_metadata(ff_z0.k);
    const int M = ff_z0.obs.count, N = ff_z0.inc.count;
    const auto dirs = geometry::uniform_directions(N);
    const double k = ff_z0.k;
    const double wN = kTwoPi / N, wM = kTwoPi / M;

    Eigen::VectorXd col_power(N);  // sum_i |ff(i,j)|^2
    for (int j = 0; j < N; ++j) col_power(j) = ff_z0.values.col(j).squaredNorm();
    MatrixXcd fft = ff_z0.values.transpose();  // N x M

    IndicatorDecomposition dec{grid,
                               std::vector<double>(grid.size()),
                               std::vector<double>(grid.size()),
                               std::vector<double>(grid.size())};

    std::size_t blocks = (grid.size() + kChunk - 1) / kChunk;
    parallel_for(blocks, [&](std::size_t b) {
        std::size_t base = b * kChunk;
        std::size_t rows = std::min(kChunk, grid.size() - base);
        MatrixXcd eplus = phase_block(grid, base, rows, k, z0, dirs, +1.0);
        MatrixXcd v = eplus.conjugate() * fft;  // rows x M, e^{-ik(z-z0).d}
        MatrixXcd wmat = eplus * fft;
        Eigen::VectorXcd cpow = eplus * col_power.cast<Complex>();
        for (std::size_t r = 0; r < rows; ++r) {
            int ri = static_cast<int>(r);
            dec.boundary_term[base + r] = wM * wN * wN * v.row(ri).squaredNorm();
            dec.mirror_term[base + r] = wM * wN * wN * wmat.row(ri).squaredNorm();
            double dist = (grid.point(base + r) - z0).norm();
            dec.center_term[base + r] = kTwoPi * specfun::bessel_j0(k * dist) * wM * wN *
                                        2.0 * cpow(ri).real();
        }
    });
    return dec;
}

IndicatorField combined_decomposition_field(const IndicatorDecomposition& dec) {
    IndicatorField f{dec.grid, std::vector<double>(dec.grid.size()),
                     {"phaseless-decomposition", 0.0, {0.0, 0.0}, false}};
    for (std::size_t i = 0; i < f.values.size(); ++i)
        f.values[i] = std::abs(dec.boundary_term[i] + dec.mirror_term[i] +
                               dec.center_term[i]);
    check_field(f);
    return f;
}

IndicatorField indicator_fulldata(const forward::FarFieldMatrix& ff,
                                  const geometry::SamplingGrid& grid) {
    require_metadata(ff.k);
    if (ff.z0.norm() != 0.0)
        throw std::invalid_argument(
            "indicator_fulldata: needs a plain far-field matrix, got one referenced "
            "to a shifted incident field");
    const int M = ff.obs.count, N = ff.inc.count;
    const double w = (kTwoPi / M) * (kTwoPi / N);
    IndicatorField field{grid, std::vector<double>(grid.size()),
                         {"fulldata", ff.k, {0.0, 0.0}, false}};

    std::size_t blocks = (grid.size() + kChunk - 1) / kChunk;
    parallel_for(blocks, [&](std::size_t b) {
        std::size_t base = b * kChunk;
        std::size_t rows = std::min(kChunk, grid.size() - base);
        // phases ride on the observation directions here, no reference shift
        MatrixXcd e = phase_block(grid, base, rows, ff.k, {0.0, 0.0}, ff.obs, +1.0);
        MatrixXcd v = e * ff.values;  // rows x N
        for (std::size_t r = 0; r < rows; ++r)
            field.values[base + r] = w * v.row(static_cast<int>(r)).squaredNorm();
    });
    check_field(field);
    return field;
}

double realness_check(const data::PhaselessTensor& pt, const Vec2& z) {
    require_metadata(pt.k);
    const int N = pt.inc_count;
    const auto dirs = geometry::uniform_directions(N);
    std::vector<Complex> e(N);
    for (int j = 0; j < N; ++j)
        e[j] = std::exp(kImag * pt.k * (z - pt.z0).dot(dirs.direction(j)));

    Complex full = 0.0, diag = 0.0;
    for (int i = 0; i < pt.obs_count; ++i)
        for (int j = 0; j < N; ++j) {
            for (int l = 0; l < N; ++l) full += pt.at(i, j, l) * e[j] * std::conj(e[l]);
            diag += pt.at(i, j, j);
        }
    Complex off = full - diag;
    double r_full = std::abs(full.imag()) / (std::abs(full) + 1e-300);
    double r_off = std::abs(off.imag()) / (std::abs(off) + 1e-300);
    return std::max(r_full, r_off);
}

}  // namespace scatter::imaging
