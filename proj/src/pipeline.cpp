#include "scatter/pipeline.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <queue>

#include <json.hpp>

namespace scatter::pipeline {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kToolVersion = "0.1.0";

[[noreturn]] void bad_key(const std::string& where, const std::string& key) {
    throw ConfigError("config: unknown key '" + key + "' in " + where);
}

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) ok = true;
        if (!ok) bad_key(where, it.key());
    }
}

Vec2 parse_vec2(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2)
        throw ConfigError("config: " + what + " must be [x, y]");
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::array<double, 4> curve_bbox(const geometry::ParametricCurve& c) {
    double ax = 1e300, bx = -1e300, ay = 1e300, by = -1e300;
    for (int i = 0; i < 512; ++i) {
        Vec2 p = c.point(kTwoPi * i / 512.0);
        ax = std::min(ax, p.x());
        bx = std::max(bx, p.x());
        ay = std::min(ay, p.y());
        by = std::max(by, p.y());
    }
    return {ax, bx, ay, by};
}

double quantile_threshold(const std::vector<double>& values, double q) {
    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    auto idx = static_cast<std::size_t>(std::floor((1.0 - q) * (sorted.size() - 1)));
    return sorted[idx];
}

json component_json(const Component& c) {
    json j;
    j["box_index"] = {c.min_ix, c.max_ix, c.min_iy, c.max_iy};
    j["box_world"] = c.world_box;
    j["points"] = c.point_count;
    j["centroid"] = {c.centroid.x(), c.centroid.y()};
    return j;
}

}  // namespace

forward::Obstacle ShapeConfig::obstacle() const {
    geometry::ParametricCurve curve = geometry::make_shape(kind, center, radius);
    forward::BoundaryCondition cond;
    switch (bc) {
        case forward::BoundaryKind::Dirichlet:
            cond = forward::BoundaryCondition::dirichlet();
            break;
        case forward::BoundaryKind::Impedance: {
            double base = rho_base, amp = rho_sin;
            cond = forward::BoundaryCondition::impedance(
                [base, amp](double t) { return Complex(base + amp * std::sin(t), 0.0); });
            break;
        }
        case forward::BoundaryKind::Transmission:
            cond = forward::BoundaryCondition::transmission(refractive_index,
                                                            transmission_lambda);
            break;
    }
    return {std::move(curve), std::move(cond)};
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: parse failure: ") + e.what());
    }
    check_keys(j, "top level",
               {"k", "shapes", "M", "N", "nodes", "z10", "z20", "region", "resolution",
                "noise_delta", "seed", "quantile", "include_diagonal", "output_dir"});
    ExperimentConfig cfg;
    try {
        cfg.k = j.at("k").get<double>();
        cfg.obs_count = j.at("M").get<int>();
        cfg.inc_count = j.at("N").get<int>();
        cfg.node_count = j.value("nodes", 256);
        cfg.z10 = parse_vec2(j.at("z10"), "z10");
        cfg.z20 = parse_vec2(j.at("z20"), "z20");
        const json& r = j.at("region");
        if (!r.is_array() || r.size() != 4)
            throw ConfigError("config: region must be [ax, bx, ay, by]");
        for (int i = 0; i < 4; ++i) cfg.region[i] = r.at(i).get<double>();
        if (j.contains("resolution")) {
            cfg.res_nx = j.at("resolution").at(0).get<int>();
            cfg.res_ny = j.at("resolution").at(1).get<int>();
        }
        cfg.noise_delta = j.value("noise_delta", 0.0);
        cfg.seed = j.value("seed", std::uint64_t{0});
        cfg.quantile = j.value("quantile", 0.10);
        cfg.include_diagonal = j.value("include_diagonal", false);
        cfg.output_dir = j.value("output_dir", ".");
        for (const json& s : j.at("shapes")) {
            check_keys(s, "shape",
                       {"kind", "center", "radius", "bc", "rho", "n", "lambda"});
            ShapeConfig sc;
            sc.kind = geometry::shape_kind_from_name(s.at("kind").get<std::string>());
            sc.center = parse_vec2(s.at("center"), "shape center");
            sc.radius = s.value("radius", 1.0);
            std::string bc = s.value("bc", "dirichlet");
            if (bc == "dirichlet") {
                sc.bc = forward::BoundaryKind::Dirichlet;
            } else if (bc == "impedance" || bc == "neumann") {
                sc.bc = forward::BoundaryKind::Impedance;
                if (s.contains("rho")) {
                    const json& rho = s.at("rho");
                    if (rho.is_number()) {
                        sc.rho_base = rho.get<double>();
                    } else {
                        check_keys(rho, "rho", {"base", "sin"});
                        sc.rho_base = rho.value("base", 0.0);
                        sc.rho_sin = rho.value("sin", 0.0);
                    }
                }
            } else if (bc == "transmission") {
                sc.bc = forward::BoundaryKind::Transmission;
                sc.refractive_index = s.at("n").get<double>();
                sc.transmission_lambda = s.at("lambda").get<double>();
            } else {
                throw ConfigError("config: unknown boundary condition '" + bc + "'");
            }
            cfg.shapes.push_back(sc);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return from_json_text(text);
}

void ExperimentConfig::validate() const {
    if (!(k > 0.0)) throw ConfigError("config: k must be positive");
    if (shapes.empty()) throw ConfigError("config: at least one shape required");
    if (obs_count < 2 || inc_count < 2) throw ConfigError("config: M, N must be >= 2");
    if (node_count < 16 || node_count % 2 != 0)
        throw ConfigError("config: nodes must be even and >= 16");
    if ((z10 - z20).norm() == 0.0) throw ConfigError("config: z10 and z20 must differ");
    if (!(quantile > 0.0 && quantile < 0.5))
        throw ConfigError("config: quantile must lie in (0, 0.5)");
    if (noise_delta < 0.0 || noise_delta > 1.0)
        throw ConfigError("config: noise_delta must lie in [0, 1]");
    if (!(region[1] > region[0]) || !(region[3] > region[2]))
        throw ConfigError("config: degenerate region");
    for (const ShapeConfig& s : shapes) {
        auto bb = curve_bbox(geometry::make_shape(s.kind, s.center, s.radius));
        if (bb[0] < region[0] || bb[1] > region[1] || bb[2] < region[2] ||
            bb[3] > region[3])
            throw ConfigError("config: region does not contain shape '" +
                              geometry::shape_kind_name(s.kind) + "'");
    }
}

std::string ExperimentConfig::canonical_json() const {
    json j;
    j["k"] = k;
    j["M"] = obs_count;
    j["N"] = inc_count;
    j["nodes"] = node_count;
    j["z10"] = {z10.x(), z10.y()};
    j["z20"] = {z20.x(), z20.y()};
    j["region"] = region;
    j["resolution"] = {res_nx, res_ny};
    j["noise_delta"] = noise_delta;
    j["seed"] = seed;
    j["quantile"] = quantile;
    j["include_diagonal"] = include_diagonal;
    json shapes_j = json::array();
    for (const ShapeConfig& s : shapes) {
        json sj;
        sj["kind"] = geometry::shape_kind_name(s.kind);
        sj["center"] = {s.center.x(), s.center.y()};
        sj["radius"] = s.radius;
        switch (s.bc) {
            case forward::BoundaryKind::Dirichlet:
                sj["bc"] = "dirichlet";
                break;
            case forward::BoundaryKind::Impedance:
                sj["bc"] = "impedance";
                sj["rho"] = {s.rho_base, s.rho_sin};
                break;
            case forward::BoundaryKind::Transmission:
                sj["bc"] = "transmission";
                sj["n"] = s.refractive_index;
                sj["lambda"] = s.transmission_lambda;
                break;
        }
        shapes_j.push_back(sj);
    }
    j["shapes"] = shapes_j;
    return j.dump();
}

std::string ExperimentConfig::digest() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a(canonical_json()));
    return buf;
}

std::vector<forward::Obstacle> ExperimentConfig::obstacles() const {
    std::vector<forward::Obstacle> out;
    out.reserve(shapes.size());
    for (const ShapeConfig& s : shapes) out.push_back(s.obstacle());
    return out;
}

geometry::SamplingGrid wavelength_grid(double ax, double bx, double ay, double by,
                                       double k, double points_per_wavelength) {
    double h = kTwoPi / (k * points_per_wavelength);
    int nx = static_cast<int>(std::ceil((bx - ax) / h)) + 1;
    int ny = static_cast<int>(std::ceil((by - ay) / h)) + 1;
    return geometry::make_grid(ax, bx, ay, by, std::max(nx, 2), std::max(ny, 2));
}

std::vector<Component> extract_components(const imaging::IndicatorField& field,
                                          double q) {
    const auto& grid = field.grid;
    const auto& v = field.values;
    auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    if (*mx == *mn)
        throw std::runtime_error(
            "extract_components: field is constant, no meaningful top set");
    double thr = quantile_threshold(v, q);

    std::vector<int> label(v.size(), -1);
    std::vector<Component> comps;
    for (std::size_t start = 0; start < v.size(); ++start) {
        if (v[start] < thr || label[start] >= 0) continue;
        Component c;
        c.min_ix = c.max_ix = static_cast<int>(start % grid.nx);
        c.min_iy = c.max_iy = static_cast<int>(start / grid.nx);
        Vec2 sum{0.0, 0.0};
        std::queue<std::size_t> todo;
        todo.push(start);
        label[start] = static_cast<int>(comps.size());
        while (!todo.empty()) {
            std::size_t p = todo.front();
            todo.pop();
            c.cells.push_back(static_cast<std::uint32_t>(p));
            int ix = static_cast<int>(p % grid.nx), iy = static_cast<int>(p / grid.nx);
            c.min_ix = std::min(c.min_ix, ix);
            c.max_ix = std::max(c.max_ix, ix);
            c.min_iy = std::min(c.min_iy, iy);
            c.max_iy = std::max(c.max_iy, iy);
            sum += grid.point(ix, iy);
            ++c.point_count;
            const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
            for (int d = 0; d < 4; ++d) {
                int jx = ix + dx[d], jy = iy + dy[d];
                if (jx < 0 || jx >= grid.nx || jy < 0 || jy >= grid.ny) continue;
                std::size_t np = static_cast<std::size_t>(jy) * grid.nx + jx;
                if (v[np] >= thr && label[np] < 0) {
                    label[np] = label[start];
                    todo.push(np);
                }
            }
        }
        c.centroid = sum / static_cast<double>(c.point_count);
        std::sort(c.cells.begin(), c.cells.end());
        c.world_box = {grid.point(c.min_ix, 0).x(), grid.point(c.max_ix, 0).x(),
                       grid.point(0, c.min_iy).y(), grid.point(0, c.max_iy).y()};
        comps.push_back(c);
    }
    std::sort(comps.begin(), comps.end(), [](const Component& a, const Component& b) {
        if (a.point_count != b.point_count) return a.point_count > b.point_count;
        if (a.min_iy != b.min_iy) return a.min_iy < b.min_iy;
        return a.min_ix < b.min_ix;
    });
    return comps;
}

namespace {

geometry::SamplingGrid stage_grid(const ExperimentConfig& cfg) {
    if (cfg.res_nx > 0 && cfg.res_ny > 0)
        return geometry::make_grid(cfg.region[0], cfg.region[1], cfg.region[2],
                                   cfg.region[3], cfg.res_nx, cfg.res_ny);
    return wavelength_grid(cfg.region[0], cfg.region[1], cfg.region[2], cfg.region[3],
                           cfg.k);
}

data::PhaselessTensor stage_dataset(const ExperimentConfig& cfg, int stage,
                                    std::string& path_out) {
    const Vec2 z0 = (stage == 1) ? cfg.z10 : cfg.z20;
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(stage - 1);
    fs::create_directories(cfg.output_dir);
    fs::path path = fs::path(cfg.output_dir) /
                    ("data_" + cfg.digest() + "_z" + std::to_string(stage) + ".pfd1");
    path_out = path.string();
    if (fs::exists(path)) {
        data::PhaselessTensor pt = data::load_phaseless(path.string());
        if (pt.obs_count != cfg.obs_count || pt.inc_count != cfg.inc_count ||
            pt.k != cfg.k || (pt.z0 - z0).norm() > 0.0)
            throw FormatError(path.string() + ": cached dataset does not match config");
        return pt;
    }
    auto obstacles = cfg.obstacles();
    auto ff = forward::solve_farfield(obstacles, cfg.k,
                                      geometry::uniform_directions(cfg.obs_count),
                                      geometry::uniform_directions(cfg.inc_count),
                                      cfg.node_count);
    auto shifted = data::shift_to_reference(ff, z0);
    auto pt = data::assemble_phaseless(shifted);
    pt = data::add_noise_phaseless(pt, {cfg.noise_delta, seed});
    data::save_dataset(path.string(), pt, cfg.noise_delta, seed);
    return pt;
}

}  // namespace

StageResult run_stage(const ExperimentConfig& cfg, int stage) {
    if (stage != 1 && stage != 2)
        throw std::domain_error("run_stage: stage must be 1 or 2");
    StageResult res;
    data::PhaselessTensor pt = stage_dataset(cfg, stage, res.dataset_path);
    res.field = imaging::indicator_phaseless(pt, stage_grid(cfg), cfg.include_diagonal);
    res.components = extract_components(res.field, cfg.quantile);
    res.threshold = quantile_threshold(res.field.values, cfg.quantile);
    return res;
}

double component_overlap(const Component& a, const Component& b) {
    std::size_t inter = 0, ia = 0, ib = 0;
    while (ia < a.cells.size() && ib < b.cells.size()) {
        if (a.cells[ia] == b.cells[ib]) {
            ++inter;
            ++ia;
            ++ib;
        } else if (a.cells[ia] < b.cells[ib]) {
            ++ia;
        } else {
            ++ib;
        }
    }
    std::size_t uni = a.cells.size() + b.cells.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
}

std::vector<PersistentComponent> persistent_components(
    const std::vector<Component>& stage1, const std::vector<Component>& stage2,
    const geometry::SamplingGrid& grid, double iou_tol) {
    // Speckle guard: with noisy data the top set sprinkles one-or-two point
    // components everywhere, and a pair of those can land on the same cell in
    // both stages by chance. Only components carrying a visible share of the
    // top set take part in the matching.
    auto min_points = [](const std::vector<Component>& comps) {
        std::size_t total = 0;
        for (const Component& c : comps) total += c.point_count;
        return std::max<std::size_t>(4, total / 50);
    };
    const std::size_t floor1 = min_points(stage1), floor2 = min_points(stage2);

    std::vector<PersistentComponent> out;
    for (const Component& c1 : stage1)
        for (const Component& c2 : stage2) {
            if (c1.point_count < floor1 || c2.point_count < floor2) continue;
            if (component_overlap(c1, c2) <= iou_tol) continue;
            PersistentComponent pc;
            pc.stage1 = &c1;
            pc.stage2 = &c2;
            std::set_intersection(c1.cells.begin(), c1.cells.end(), c2.cells.begin(),
                                  c2.cells.end(), std::back_inserter(pc.cells));
            Vec2 sum{0.0, 0.0};
            for (std::uint32_t cell : pc.cells) sum += grid.point(cell);
            pc.centroid = sum / static_cast<double>(pc.cells.size());
            out.push_back(std::move(pc));
        }
    return out;
}

Rect disambiguate(const std::vector<Component>& stage1,
                  const std::vector<Component>& stage2, const ExperimentConfig& cfg,
                  double iou_tol) {
    auto grid = stage_grid(cfg);
    auto persistent = persistent_components(stage1, stage2, grid, iou_tol);
    if (persistent.empty())
        throw std::runtime_error(
            "disambiguate: no component persists across the two reference points; "
            "re-run with a different z20");
    double ax = 1e300, bx = -1e300, ay = 1e300, by = -1e300;
    for (const PersistentComponent& pc : persistent)
        for (const Component* c : {pc.stage1, pc.stage2}) {
            ax = std::min(ax, c->world_box[0]);
            bx = std::max(bx, c->world_box[1]);
            ay = std::min(ay, c->world_box[2]);
            by = std::max(by, c->world_box[3]);
        }
    double pad = 0.2 * std::hypot(bx - ax, by - ay);
    Rect r{ax - pad, bx + pad, ay - pad, by + pad};
    r.ax = std::max(r.ax, cfg.region[0]);
    r.bx = std::min(r.bx, cfg.region[1]);
    r.ay = std::max(r.ay, cfg.region[2]);
    r.by = std::min(r.by, cfg.region[3]);
    return r;
}

ReconstructionResult run_stage2_reconstruction(const ExperimentConfig& cfg,
                                               const Rect& omega_s) {
    std::string path;
    data::PhaselessTensor pt = stage_dataset(cfg, 2, path);
    // double density relative to the screening pass
    auto grid = wavelength_grid(omega_s.ax, omega_s.bx, omega_s.ay, omega_s.by, cfg.k,
                                20.0);
    ReconstructionResult res;
    res.field = imaging::indicator_phaseless(pt, grid, cfg.include_diagonal);
    std::vector<double> sorted(res.field.values);
    std::sort(sorted.begin(), sorted.end());
    double median = sorted[sorted.size() / 2];
    double mx = sorted.back();
    res.low_contrast = mx < 3.0 * median;
    return res;
}

std::vector<std::string> export_heatmap(const imaging::IndicatorField& field,
                                        const std::string& prefix) {
    const auto& grid = field.grid;
    std::vector<std::string> written;

    std::string csv_path = prefix + ".csv";
    {
        std::FILE* f = std::fopen(csv_path.c_str(), "wb");
        if (!f) throw std::runtime_error("export_heatmap: cannot write " + csv_path);
        std::fputs("x,y,value\n", f);
        for (int iy = 0; iy < grid.ny; ++iy)
            for (int ix = 0; ix < grid.nx; ++ix) {
                Vec2 p = grid.point(ix, iy);
                std::fprintf(f, "%.17g,%.17g,%.17g\n", p.x(), p.y(),
                             field.values[static_cast<std::size_t>(iy) * grid.nx + ix]);
            }
        std::fclose(f);
        written.push_back(csv_path);
    }

    std::string pgm_path = prefix + ".pgm";
    {
        auto [mn, mx] = std::minmax_element(field.values.begin(), field.values.end());
        double lo = *mn, span = *mx - *mn;
        std::FILE* f = std::fopen(pgm_path.c_str(), "wb");
        if (!f) throw std::runtime_error("export_heatmap: cannot write " + pgm_path);
        std::fprintf(f, "P5\n%d %d\n255\n", grid.nx, grid.ny);
        std::vector<unsigned char> row(grid.nx);
        for (int iy = grid.ny - 1; iy >= 0; --iy) {  // top of region first
            for (int ix = 0; ix < grid.nx; ++ix) {
                double v = field.values[static_cast<std::size_t>(iy) * grid.nx + ix];
                double g = span > 0.0 ? 255.0 * (v - lo) / span : 0.0;
                row[ix] = static_cast<unsigned char>(std::lround(g));
            }
            std::fwrite(row.data(), 1, row.size(), f);
        }
        std::fclose(f);
        written.push_back(pgm_path);
    }
    return written;
}

LocalizationMetrics localization_metrics(const imaging::IndicatorField& field,
                                         std::span<const geometry::ParametricCurve> truth,
                                         const Vec2& z0, double top_fraction) {
    if (truth.empty())
        throw std::domain_error("localization_metrics: empty truth set");
    if (!(field.provenance.k > 0.0))
        throw std::invalid_argument("localization_metrics: field carries no wavenumber");
    const double band = 0.5 * kTwoPi / field.provenance.k;

    constexpr int kSamples = 2048;
    std::vector<Vec2> cloud;
    cloud.reserve(truth.size() * kSamples * 2 + 1);
    for (const auto& curve : truth) {
        for (int i = 0; i < kSamples; ++i) {
            Vec2 p = curve.point(kTwoPi * i / kSamples);
            cloud.push_back(p);
            cloud.push_back(2.0 * z0 - p);
        }
    }
    cloud.push_back(z0);

    double thr = quantile_threshold(field.values, top_fraction);
    std::vector<double> dists;
    for (std::size_t idx = 0; idx < field.values.size(); ++idx) {
        if (field.values[idx] < thr) continue;
        Vec2 z = field.grid.point(idx);
        double best = 1e300;
        for (const Vec2& p : cloud) best = std::min(best, (z - p).norm());
        dists.push_back(best);
    }
    LocalizationMetrics m;
    m.top_count = dists.size();
    if (dists.empty()) return m;
    std::size_t near = 0;
    for (double d : dists)
        if (d <= band) ++near;
    m.fraction_near = static_cast<double>(near) / dists.size();
    std::sort(dists.begin(), dists.end());
    m.median_distance = dists[dists.size() / 2];
    return m;
}

PipelineOutcome run_pipeline(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    PipelineOutcome out;
    out.stage1 = run_stage(cfg, 1);
    out.stage2 = run_stage(cfg, 2);
    for (const Component& c : out.stage1.components) {
        Rect box{c.world_box[0], c.world_box[1], c.world_box[2], c.world_box[3]};
        if (box.contains(cfg.z20))
            std::cerr << "warning: z20 lies inside a stage-1 component; "
                         "disambiguation may be unreliable\n";
    }
    out.omega_s = disambiguate(out.stage1.components, out.stage2.components, cfg);
    auto persistent = persistent_components(out.stage1.components,
                                            out.stage2.components,
                                            out.stage1.field.grid);
    out.reconstruction = run_stage2_reconstruction(cfg, out.omega_s);

    std::vector<geometry::ParametricCurve> truth;
    for (const ShapeConfig& s : cfg.shapes)
        truth.push_back(geometry::make_shape(s.kind, s.center, s.radius));
    out.metrics = localization_metrics(out.reconstruction.field, truth, cfg.z20);

    fs::path dir(cfg.output_dir);
    auto add = [&out](std::vector<std::string> v) {
        out.files.insert(out.files.end(), v.begin(), v.end());
    };
    add(export_heatmap(out.stage1.field, (dir / "stage1").string()));
    add(export_heatmap(out.stage2.field, (dir / "stage2").string()));
    add(export_heatmap(out.reconstruction.field, (dir / "reconstruction").string()));

    json report;
    report["stage1_components"] = json::array();
    for (const auto& c : out.stage1.components)
        report["stage1_components"].push_back(component_json(c));
    report["stage2_components"] = json::array();
    for (const auto& c : out.stage2.components)
        report["stage2_components"].push_back(component_json(c));
    report["persistent"] = json::array();
    for (const auto& pc : persistent) {
        json pj;
        pj["centroid"] = {pc.centroid.x(), pc.centroid.y()};
        pj["cells"] = pc.cells.size();
        report["persistent"].push_back(pj);
    }
    report["omega_s"] = {out.omega_s.ax, out.omega_s.bx, out.omega_s.ay, out.omega_s.by};
    report["low_contrast"] = out.reconstruction.low_contrast;
    report["metrics"] = {{"fraction_near", out.metrics.fraction_near},
                         {"median_distance", out.metrics.median_distance},
                         {"top_count", out.metrics.top_count}};
    std::string report_path = (dir / "report.json").string();
    std::ofstream(report_path) << report.dump(2) << '\n';
    out.files.push_back(report_path);

    json manifest;
    manifest["tool_version"] = kToolVersion;
    manifest["config_digest"] = cfg.digest();
    manifest["config"] = json::parse(cfg.canonical_json());
    manifest["rng"] = data::rng_name();
    manifest["stage_seeds"] = {cfg.seed, cfg.seed + 1};
    json names = json::array();
    for (const auto& f : out.files) names.push_back(fs::path(f).filename().string());
    manifest["outputs"] = names;
    std::string manifest_path = (dir / "manifest.json").string();
    std::ofstream(manifest_path) << manifest.dump(2) << '\n';
    out.files.push_back(manifest_path);
    return out;
}

}  // namespace scatter::pipeline
