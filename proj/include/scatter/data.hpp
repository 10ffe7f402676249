#ifndef SCATTER_DATA_HPP
#define SCATTER_DATA_HPP

#include <cstdint>
#include <random>
#include <string>
#include <variant>

#include "scatter/forward.hpp"

namespace scatter::data {

// Squared-modulus far-field table under two-plane-wave incidence referenced
// to z0: entry (i,j,l) = |ff(i,j) + ff(i,l)|^2. Stored dense, row-major in
// (i,j,l).
struct PhaselessTensor {
    double k = 0.0;
    Vec2 z0{0.0, 0.0};
    int obs_count = 0;  // M
    int inc_count = 0;  // N
    std::vector<double> values;

    double& at(int i, int j, int l) {
        return values[(static_cast<std::size_t>(i) * inc_count + j) * inc_count + l];
    }
    double at(int i, int j, int l) const {
        return values[(static_cast<std::size_t>(i) * inc_count + j) * inc_count + l];
    }
};

struct NoiseSpec {
    double delta = 0.0;
    std::uint64_t seed = 0;
};

// How the phaseless noise draws map onto tensor entries: one draw per
// unordered direction pair keeps the (j,l) symmetry; one draw per entry
// breaks it.
enum class PhaselessNoiseMode { PairedSymmetric, IndependentEntries };

// ff referenced to z0: entry (i,j) *= e^{-ik z0 . d_j}, the far field for
// the incident wave e^{ik (x - z0) . d_j}. Successive shifts compose.
forward::FarFieldMatrix shift_to_reference(const forward::FarFieldMatrix& ff,
                                           const Vec2& z0);

// The tensor inherits the reference point the matrix was shifted to.
PhaselessTensor assemble_phaseless(const forward::FarFieldMatrix& ff_z0);

forward::FarFieldMatrix add_noise_farfield(const forward::FarFieldMatrix& ff,
                                           const NoiseSpec& spec);

PhaselessTensor add_noise_phaseless(const PhaselessTensor& pt, const NoiseSpec& spec,
                                    PhaselessNoiseMode mode = PhaselessNoiseMode::PairedSymmetric);

// PFD1 container: one JSON header line, then little-endian float64 payload.
// Round-trips are bit exact.
void save_dataset(const std::string& path, const forward::FarFieldMatrix& ff,
                  double noise_delta = 0.0, std::uint64_t seed = 0);
void save_dataset(const std::string& path, const PhaselessTensor& pt,
                  double noise_delta = 0.0, std::uint64_t seed = 0,
                  PhaselessNoiseMode mode = PhaselessNoiseMode::PairedSymmetric);

using Dataset = std::variant<forward::FarFieldMatrix, PhaselessTensor>;
Dataset load_dataset(const std::string& path);
forward::FarFieldMatrix load_farfield(const std::string& path);
PhaselessTensor load_phaseless(const std::string& path);

// Name of the generator recorded in dataset headers.
std::string rng_name();

// Deterministic standard-normal stream: mt19937_64 raw words mapped through
// an explicit Box-Muller transform, so the byte stream is identical across
// standard libraries.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
    double next();

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
    double uniform01();
};

}  // namespace scatter::data

#endif
