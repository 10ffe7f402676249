#include "scatter/specfun.hpp"

#include <cmath>
#include <numbers>

namespace scatter::specfun {

namespace {

constexpr double kMaxArgument = 1.0e4;
constexpr double kSeriesAsymptoticSplit = 12.0;
constexpr long double kGamma = std::numbers::egamma_v<long double>;
constexpr long double kPiL = std::numbers::pi_v<long double>;

void require_finite(double t) {
    if (!std::isfinite(t)) throw std::domain_error("specfun: non-finite argument");
    if (std::abs(t) > kMaxArgument)
        throw std::domain_error("specfun: argument beyond 1e4 rejected");
}

// Ascending series, long double accumulation. Valid for any t but only used
// below the split where cancellation stays under control.
long double j0_series(long double t) {
    long double q = 0.25L * t * t;
    long double term = 1.0L, sum = 1.0L;
    for (int p = 1; p < 200; ++p) {
        term *= -q / (static_cast<long double>(p) * p);
        sum += term;
        if (std::abs(term) < 1e-18L) break;
    }
    return sum;
}

long double j1_series(long double t) {
    long double q = 0.25L * t * t;
    long double term = 0.5L * t, sum = term;
    for (int p = 1; p < 200; ++p) {
        term *= -q / (static_cast<long double>(p) * (p + 1));
        sum += term;
        if (std::abs(term) < 1e-18L) break;
    }
    return sum;
}

long double y0_series(long double t) {
    long double q = 0.25L * t * t;
    long double term = 1.0L;   // q^p / (p!)^2
    long double h = 0.0L;      // harmonic number H_p
    long double sum = 0.0L;
    for (int p = 1; p < 200; ++p) {
        term *= q / (static_cast<long double>(p) * p);
        h += 1.0L / p;
        long double add = (p % 2 == 1 ? h : -h) * term;
        sum += add;
        if (std::abs(add) < 1e-18L) break;
    }
    return (2.0L / kPiL) * ((std::log(0.5L * t) + kGamma) * j0_series(t) + sum);
}

long double y1_series(long double t) {
    long double q = 0.25L * t * t;
    // Sum over p of (-1)^p (psi(p+1)+psi(p+2)) q^p (t/2) / (p!(p+1)!),
    // psi(p+1) = -gamma + H_p.
    long double term = 0.5L * t;
    long double hp = 0.0L, hp1 = 1.0L;
    long double sum = term * (-2.0L * kGamma + hp + hp1);
    for (int p = 1; p < 200; ++p) {
        term *= -q / (static_cast<long double>(p) * (p + 1));
        hp += 1.0L / p;
        hp1 += 1.0L / (p + 1);
        long double add = term * (-2.0L * kGamma + hp + hp1);
        sum += add;
        if (std::abs(add) < 1e-18L) break;
    }
    return (2.0L / kPiL) * std::log(0.5L * t) * j1_series(t) - 2.0L / (kPiL * t)
           - sum / kPiL;
}

// Hankel asymptotic modulus/phase series P, Q for order nu in {0, 1}.
// Terms use the Hankel symbol (nu,m) = prod_{j<=m}(4nu^2-(2j-1)^2)/(4^m m!);
// both sums are truncated at their smallest term.
struct PQ {
    long double p, q;
};

PQ hankel_pq(int nu, long double t) {
    long double mu = 4.0L * nu * nu;
    long double inv2t = 1.0L / (2.0L * t);
    long double term = 1.0L;  // (nu,m)/(2t)^m
    long double p = 1.0L, q = 0.0L;
    long double last = std::abs(term);
    for (int m = 0; m < 200; ++m) {
        long double odd = 2.0L * m + 1.0L;
        term *= (mu - odd * odd) / (4.0L * (m + 1)) * inv2t;
        long double mag = std::abs(term);
        if (mag > last) break;  // past the optimal truncation point
        last = mag;
        // term now carries (nu,m+1)/(2t)^{m+1}; sign pattern (-1)^k applies
        // to pairs of terms: P takes even m-indices, Q odd ones.
        int idx = m + 1;
        int k = idx / 2;
        long double signed_term = (k % 2 == 0) ? term : -term;
        if (idx % 2 == 0)
            p += signed_term;
        else
            q += signed_term;
        if (mag < 1e-19L) break;
    }
    return {p, q};
}

struct JY {
    long double j, y;
};

JY jy_asymptotic(int nu, long double t) {
    PQ pq = hankel_pq(nu, t);
    long double chi = t - (0.5L * nu + 0.25L) * kPiL;
    long double c = std::cos(chi), s = std::sin(chi);
    long double amp = std::sqrt(2.0L / (kPiL * t));
    return {amp * (pq.p * c - pq.q * s), amp * (pq.p * s + pq.q * c)};
}

}  // namespace

double bessel_j0(double t) {
    require_finite(t);
    long double a = std::abs(static_cast<long double>(t));
    if (a < kSeriesAsymptoticSplit) return static_cast<double>(j0_series(a));
    return static_cast<double>(jy_asymptotic(0, a).j);
}

double bessel_j1(double t) {
    require_finite(t);
    long double a = std::abs(static_cast<long double>(t));
    double v = a < kSeriesAsymptoticSplit ? static_cast<double>(j1_series(a))
                                          : static_cast<double>(jy_asymptotic(1, a).j);
    return t < 0 ? -v : v;
}

double bessel_y0(double t) {
    require_finite(t);
    if (t <= 0.0) throw std::domain_error("bessel_y0: argument must be positive");
    if (t < kSeriesAsymptoticSplit) return static_cast<double>(y0_series(t));
    return static_cast<double>(jy_asymptotic(0, t).y);
}

double bessel_y1(double t) {
    require_finite(t);
    if (t <= 0.0) throw std::domain_error("bessel_y1: argument must be positive");
    if (t < kSeriesAsymptoticSplit) return static_cast<double>(y1_series(t));
    return static_cast<double>(jy_asymptotic(1, t).y);
}

Complex hankel1_0(double t) { return {bessel_j0(t), bessel_y0(t)}; }

Complex hankel1_1(double t) { return {bessel_j1(t), bessel_y1(t)}; }

double funk_hecke(double k, const Vec2& x) {
    if (!(k > 0.0)) throw std::domain_error("funk_hecke: wavenumber must be positive");
    return kTwoPi * bessel_j0(k * x.norm());
}

const J1Peak& j1_first_maximum() {
    static const J1Peak peak = [] {
        // J1'(t) = J0(t) - J1(t)/t; bisect its sign change in [1.5, 2.5].
        auto dj1 = [](double t) { return bessel_j0(t) - bessel_j1(t) / t; };
        double lo = 1.5, hi = 2.5;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            if (dj1(mid) > 0.0)
                lo = mid;
            else
                hi = mid;
            if (hi - lo < 1e-16) break;
        }
        double t1 = 0.5 * (lo + hi);
        return J1Peak{t1, bessel_j1(t1)};
    }();
    return peak;
}

}  // namespace scatter::specfun
