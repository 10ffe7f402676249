#include "scatter/data.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace scatter::data {

namespace {

using nlohmann::json;

const Complex kImag{0.0, 1.0};

double tensor_max(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::string mode_name(PhaselessNoiseMode mode) {
    return mode == PhaselessNoiseMode::PairedSymmetric ? "paired" : "independent";
}

void write_payload(std::ofstream& out, const double* data, std::size_t count) {
    static_assert(sizeof(double) == 8);
    out.write(reinterpret_cast<const char*>(data), count * sizeof(double));
}

json read_header(std::ifstream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line))
        throw FormatError(path + ": missing PFD1 header line");
    json h;
    try {
        h = json::parse(line);
    } catch (const json::exception& e) {
        throw FormatError(path + ": malformed header: " + e.what());
    }
    if (!h.is_object() || h.value("format", "") != "PFD1")
        throw FormatError(path + ": not a PFD1 dataset");
    return h;
}

std::vector<double> read_payload(std::ifstream& in, std::size_t count,
                                 const std::string& path) {
    std::vector<double> data(count);
    in.read(reinterpret_cast<char*>(data.data()), count * sizeof(double));
    std::size_t got = static_cast<std::size_t>(in.gcount());
    if (got != count * sizeof(double))
        throw FormatError(path + ": truncated payload, expected " +
                          std::to_string(count * sizeof(double)) + " bytes, got " +
                          std::to_string(got));
    return data;
}

json common_header(const char* kind, double k, int M, int N, const Vec2& z0,
                   double delta, std::uint64_t seed) {
    json h;
    h["format"] = "PFD1";
    h["kind"] = kind;
    h["k"] = k;
    h["M"] = M;
    h["N"] = N;
    h["z0"] = {z0.x(), z0.y()};
    h["noise_delta"] = delta;
    h["rng"] = rng_name();
    h["seed"] = seed;
    return h;
}

}  // namespace

double NormalStream::uniform01() {
    // 53-bit mantissa in (0,1]; never 0, so the log below is finite.
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double NormalStream::next() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi * u2);
    have_spare_ = true;
    return r * std::cos(kTwoPi * u2);
}

std::string rng_name() { return "mt19937_64-boxmuller"; }

forward::FarFieldMatrix shift_to_reference(const forward::FarFieldMatrix& ff,
                                           const Vec2& z0) {
    forward::FarFieldMatrix out = ff;
    for (int j = 0; j < ff.inc.count; ++j) {
        Complex phase = std::exp(-kImag * ff.k * z0.dot(ff.inc.direction(j)));
        out.values.col(j) *= phase;
    }
    out.z0 = ff.z0 + z0;
    return out;
}

PhaselessTensor assemble_phaseless(const forward::FarFieldMatrix& ff_z0) {
    const int M = ff_z0.obs.count, N = ff_z0.inc.count;
    PhaselessTensor pt{ff_z0.k, ff_z0.z0, M, N, {}};
    pt.values.resize(static_cast<std::size_t>(M) * N * N);
    parallel_for(M, [&](std::size_t i) {
        for (int j = 0; j < N; ++j)
            for (int l = 0; l < N; ++l)
                pt.at(static_cast<int>(i), j, l) =
                    std::norm(ff_z0.values(i, j) + ff_z0.values(i, l));
    });
    return pt;
}

forward::FarFieldMatrix add_noise_farfield(const forward::FarFieldMatrix& ff,
                                           const NoiseSpec& spec) {
    if (spec.delta < 0.0) throw std::domain_error("noise ratio must be nonnegative");
    forward::FarFieldMatrix out = ff;
    if (spec.delta == 0.0) return out;
    double maxabs = ff.values.cwiseAbs().maxCoeff();
    NormalStream rng(spec.seed);
    for (int i = 0; i < ff.values.rows(); ++i)
        for (int j = 0; j < ff.values.cols(); ++j) {
            double z1 = rng.next();
            double z2 = rng.next();
            out.values(i, j) += spec.delta * Complex(z1, z2) * maxabs;
        }
    return out;
}

PhaselessTensor add_noise_phaseless(const PhaselessTensor& pt, const NoiseSpec& spec,
                                    PhaselessNoiseMode mode) {
    if (spec.delta < 0.0) throw std::domain_error("noise ratio must be nonnegative");
    if (spec.delta > 1.0) throw std::domain_error("noise ratio above 1 not supported");
    PhaselessTensor out = pt;
    if (spec.delta == 0.0) return out;
    double maxval = tensor_max(pt.values);
    NormalStream rng(spec.seed);
    if (mode == PhaselessNoiseMode::PairedSymmetric) {
        for (int i = 0; i < pt.obs_count; ++i)
            for (int j = 0; j < pt.inc_count; ++j)
                for (int l = j; l < pt.inc_count; ++l) {
                    double bump = spec.delta * rng.next() * maxval;
                    out.at(i, j, l) += bump;
                    if (l != j) out.at(i, l, j) += bump;
                }
    } else {
        for (double& v : out.values) v += spec.delta * rng.next() * maxval;
    }
    return out;
}

void save_dataset(const std::string& path, const forward::FarFieldMatrix& ff,
                  double noise_delta, std::uint64_t seed) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(path + ": cannot open for writing");
    json h = common_header("farfield", ff.k, ff.obs.count, ff.inc.count, ff.z0,
                           noise_delta, seed);
    out << h.dump() << '\n';
    // row-major (re, im) pairs
    std::vector<double> buf;
    buf.reserve(2 * ff.values.size());
    for (int i = 0; i < ff.values.rows(); ++i)
        for (int j = 0; j < ff.values.cols(); ++j) {
            buf.push_back(ff.values(i, j).real());
            buf.push_back(ff.values(i, j).imag());
        }
    write_payload(out, buf.data(), buf.size());
    if (!out) throw FormatError(path + ": write failed");
}

void save_dataset(const std::string& path, const PhaselessTensor& pt, double noise_delta,
                  std::uint64_t seed, PhaselessNoiseMode mode) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(path + ": cannot open for writing");
    json h = common_header("phaseless", pt.k, pt.obs_count, pt.inc_count, pt.z0,
                           noise_delta, seed);
    h["noise_mode"] = mode_name(mode);
    out << h.dump() << '\n';
    write_payload(out, pt.values.data(), pt.values.size());
    if (!out) throw FormatError(path + ": write failed");
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path + ": cannot open");
    json h = read_header(in, path);
    std::string kind;
    double k = 0.0;
    int M = 0, N = 0;
    Vec2 z0{0.0, 0.0};
    try {
        kind = h.at("kind").get<std::string>();
        k = h.at("k").get<double>();
        M = h.at("M").get<int>();
        N = h.at("N").get<int>();
        z0 = Vec2(h.at("z0").at(0).get<double>(), h.at("z0").at(1).get<double>());
    } catch (const json::exception& e) {
        throw FormatError(path + ": malformed header: " + e.what());
    }
    if (M <= 0 || N <= 0)
        throw FormatError(path + ": bad dimensions M=" + std::to_string(M) +
                          " N=" + std::to_string(N));
    if (kind == "farfield") {
        auto raw = read_payload(in, static_cast<std::size_t>(M) * N * 2, path);
        forward::FarFieldMatrix ff{k, geometry::uniform_directions(M),
                                   geometry::uniform_directions(N),
                                   Eigen::MatrixXcd(M, N), z0};
        std::size_t pos = 0;
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < N; ++j) {
                ff.values(i, j) = Complex(raw[pos], raw[pos + 1]);
                pos += 2;
            }
        return ff;
    }
    if (kind == "phaseless") {
        PhaselessTensor pt{k, z0, M, N, {}};
        pt.values = read_payload(in, static_cast<std::size_t>(M) * N * N, path);
        return pt;
    }
    throw FormatError(path + ": unknown dataset kind '" + kind + "'");
}

forward::FarFieldMatrix load_farfield(const std::string& path) {
    Dataset d = load_dataset(path);
    if (auto* ff = std::get_if<forward::FarFieldMatrix>(&d)) return std::move(*ff);
    throw FormatError(path + ": expected kind=farfield, found phaseless");
}

PhaselessTensor load_phaseless(const std::string& path) {
    Dataset d = load_dataset(path);
    if (auto* pt = std::get_if<PhaselessTensor>(&d)) return std::move(*pt);
    throw FormatError(path + ": expected kind=phaseless, found farfield");
}

}  // namespace scatter::data
