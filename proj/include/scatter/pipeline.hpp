#ifndef SCATTER_PIPELINE_HPP
#define SCATTER_PIPELINE_HPP

#include <array>
#include <optional>

#include "scatter/imaging.hpp"

namespace scatter::pipeline {

struct ShapeConfig {
    geometry::ShapeKind kind = geometry::ShapeKind::Circle;
    Vec2 center{0.0, 0.0};
    double radius = 1.0;  // circle only
    forward::BoundaryKind bc = forward::BoundaryKind::Dirichlet;
    double rho_base = 0.0, rho_sin = 0.0;  // impedance rho(t) = base + sin * sin(t)
    double refractive_index = 1.0, transmission_lambda = 1.0;

    forward::Obstacle obstacle() const;
};

struct ExperimentConfig {
    double k = 0.0;
    std::vector<ShapeConfig> shapes;
    int obs_count = 0;   // M
    int inc_count = 0;   // N
    int node_count = 0;  // boundary nodes per obstacle
    Vec2 z10{0.0, 0.0}, z20{0.0, 0.0};
    std::array<double, 4> region{};  // large sampling region: ax bx ay by
    int res_nx = 0, res_ny = 0;      // 0 -> wavelength rule
    double noise_delta = 0.0;
    std::uint64_t seed = 0;
    double quantile = 0.10;
    bool include_diagonal = false;
    std::string output_dir = ".";

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig from_json_file(const std::string& path);
    void validate() const;
    std::string digest() const;  // 16 hex chars over the canonical serialization
    std::string canonical_json() const;
    std::vector<forward::Obstacle> obstacles() const;
};

// Spacing of at least points_per_wavelength lattice points per 2*pi/k along
// each axis, corners included.
geometry::SamplingGrid wavelength_grid(double ax, double bx, double ay, double by,
                                       double k, double points_per_wavelength = 10.0);

struct Component {
    int min_ix = 0, max_ix = 0, min_iy = 0, max_iy = 0;  // inclusive lattice box
    std::size_t point_count = 0;
    Vec2 centroid{0.0, 0.0};
    std::array<double, 4> world_box{};    // ax bx ay by
    std::vector<std::uint32_t> cells;     // sorted flat lattice indices
};

// Jaccard index of the two components' lattice cells. Both must come from
// fields on the same grid.
double component_overlap(const Component& a, const Component& b);

// Connected components (4-neighbor) of the set where the field reaches its
// top-q quantile. Components come back sorted by descending point count,
// ties by lattice position. An all-equal field has no meaningful top set and
// raises an error.
std::vector<Component> extract_components(const imaging::IndicatorField& field, double q);

struct StageResult {
    imaging::IndicatorField field;
    std::vector<Component> components;
    double threshold = 0.0;
    std::string dataset_path;
};

// A component pair that survives both reference points; its stable core is
// the cell intersection, which tracks the true obstacle while the z0 spots
// and mirror artifacts move away.
struct PersistentComponent {
    const Component* stage1 = nullptr;
    const Component* stage2 = nullptr;
    std::vector<std::uint32_t> cells;  // sorted intersection
    Vec2 centroid{0.0, 0.0};
};

// Matches components across stages by cell overlap above tol. Components
// too small to be more than speckle are ignored.
std::vector<PersistentComponent> persistent_components(
    const std::vector<Component>& stage1, const std::vector<Component>& stage2,
    const geometry::SamplingGrid& grid, double iou_tol = 0.3);

// Simulates (or reloads from cache) the phaseless dataset for the chosen
// reference point and images the large region. stage is 1 (z10) or 2 (z20).
StageResult run_stage(const ExperimentConfig& cfg, int stage);

struct Rect {
    double ax = 0, bx = 0, ay = 0, by = 0;
    bool contains(const Vec2& p) const {
        return p.x() >= ax && p.x() <= bx && p.y() >= ay && p.y() <= by;
    }
};

// Keeps components persisting across both stages (box IoU above tol) and
// returns their padded bounding box; the z0 spots and mirror artifacts do
// not persist and drop out.
Rect disambiguate(const std::vector<Component>& stage1,
                  const std::vector<Component>& stage2, const ExperimentConfig& cfg,
                  double iou_tol = 0.3);

struct ReconstructionResult {
    imaging::IndicatorField field;
    bool low_contrast = false;  // max below 3x median: nothing to see here
};

ReconstructionResult run_stage2_reconstruction(const ExperimentConfig& cfg,
                                               const Rect& omega_s);

// prefix.csv (x,y,value rows, full precision) and prefix.pgm (8-bit, min-max
// normalized, top row = top of the region).
std::vector<std::string> export_heatmap(const imaging::IndicatorField& field,
                                        const std::string& prefix);

struct LocalizationMetrics {
    double fraction_near = 0.0;   // top points within half a wavelength of truth
    double median_distance = 0.0;
    std::size_t top_count = 0;
};

// Distance of the strongest indicator points to the union of the true
// boundaries, their reflections through z0, and z0 itself.
LocalizationMetrics localization_metrics(const imaging::IndicatorField& field,
                                         std::span<const geometry::ParametricCurve> truth,
                                         const Vec2& z0, double top_fraction = 0.02);

struct PipelineOutcome {
    StageResult stage1, stage2;
    Rect omega_s;
    ReconstructionResult reconstruction;
    LocalizationMetrics metrics;
    std::vector<std::string> files;
};

// Full two-reference workflow: screen the large region with both reference
// points, intersect, re-image the persistent region, report.
PipelineOutcome run_pipeline(const ExperimentConfig& cfg);

}  // namespace scatter::pipeline

#endif
