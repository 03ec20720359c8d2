#include "app/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "lrbms/error.hpp"

namespace lrbms::app {

using nlohmann::json;

namespace {

// Reads members of one JSON object and rejects keys nobody asked for.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
    }

    ~ObjectReader() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) throw ConfigError(child(key) + ": unknown key");
        }
    }

    void number(const char* key, double& out) {
        if (const json* v = find(key)) {
            if (!v->is_number()) throw ConfigError(child(key) + ": expected a number");
            out = v->get<double>();
        }
    }
    void integer(const char* key, int& out) {
        if (const json* v = find(key)) {
            if (!v->is_number_integer()) throw ConfigError(child(key) + ": expected an integer");
            out = v->get<int>();
        }
    }
    void unsigned64(const char* key, std::uint64_t& out) {
        if (const json* v = find(key)) {
            if (!v->is_number_unsigned()) {
                throw ConfigError(child(key) + ": expected a non-negative integer");
            }
            out = v->get<std::uint64_t>();
        }
    }
    void boolean(const char* key, bool& out) {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) throw ConfigError(child(key) + ": expected true or false");
            out = v->get<bool>();
        }
    }
    void string(const char* key, std::string& out) {
        if (const json* v = find(key)) {
            if (!v->is_string()) throw ConfigError(child(key) + ": expected a string");
            out = v->get<std::string>();
        }
    }
    template <class E>
    void choice(const char* key, E& out, std::initializer_list<std::pair<const char*, E>> options) {
        std::string name;
        string(key, name);
        if (name.empty()) return;
        std::string allowed;
        for (const auto& [label, value] : options) {
            if (name == label) {
                out = value;
                return;
            }
            allowed += allowed.empty() ? label : std::string(", ") + label;
        }
        throw ConfigError(child(key) + ": '" + name + "' is not one of " + allowed);
    }
    const json* object(const char* key) { return find(key); }

    std::string child(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }
    std::string where() const { return path_.empty() ? "scenario" : path_; }

private:
    const json* find(const char* key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

std::vector<double> number_list(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) {
            throw ConfigError(path + "[" + std::to_string(i) + "]: expected a number");
        }
        out.push_back(j[i].get<double>());
    }
    return out;
}

FieldGenerator read_field(const json& j, const std::string& path, FieldGenerator gen) {
    ObjectReader r(j, path);
    r.choice("kind", gen.kind,
             {{"constant", FieldGenerator::Kind::kConstant},
              {"layered", FieldGenerator::Kind::kLayered},
              {"lens", FieldGenerator::Kind::kLens},
              {"file", FieldGenerator::Kind::kFile}});
    r.number("value", gen.value);
    if (const json* v = r.object("values")) gen.values = number_list(*v, r.child("values"));
    if (const json* v = r.object("boundaries")) {
        gen.boundaries.clear();
        for (double b : number_list(*v, r.child("boundaries"))) {
            gen.boundaries.push_back(static_cast<int>(b));
            if (static_cast<double>(gen.boundaries.back()) != b) {
                throw ConfigError(r.child("boundaries") + ": row indices must be integers");
            }
        }
    }
    if (const json* v = r.object("lenses")) {
        if (!v->is_array()) throw ConfigError(r.child("lenses") + ": expected an array");
        gen.lenses.clear();
        for (std::size_t i = 0; i < v->size(); ++i) {
            ObjectReader lr((*v)[i], r.child("lenses") + "[" + std::to_string(i) + "]");
            Lens lens;
            lr.number("x0", lens.x0);
            lr.number("x1", lens.x1);
            lr.number("y0", lens.y0);
            lr.number("y1", lens.y1);
            lr.number("factor", lens.factor);
            gen.lenses.push_back(lens);
        }
    }
    r.number("noise", gen.noise);
    r.unsigned64("seed", gen.seed);
    r.string("path", gen.path);
    if (gen.kind == FieldGenerator::Kind::kFile && gen.path.empty()) {
        throw ConfigError(r.child("path") + ": file fields need a raster path");
    }
    return gen;
}

json field_to_json(const FieldGenerator& g) {
    json lenses = json::array();
    for (const Lens& l : g.lenses) {
        lenses.push_back({{"x0", l.x0}, {"x1", l.x1}, {"y0", l.y0}, {"y1", l.y1}, {"factor", l.factor}});
    }
    return {{"kind", to_string(g.kind)}, {"value", g.value},       {"values", g.values},
            {"boundaries", g.boundaries}, {"lenses", lenses},      {"noise", g.noise},
            {"seed", g.seed},             {"path", g.path}};
}

const char* bc_name(PressureBc bc) {
    switch (bc) {
        case PressureBc::kDirichlet: return "dirichlet";
        case PressureBc::kNeumann: return "neumann";
        case PressureBc::kNoFlow: return "noflow";
    }
    return "noflow";
}

void validate(const Scenario& s) {
    if (!(s.lx > 0.0)) throw ConfigError("geometry.lx: must be positive");
    if (!(s.ly > 0.0)) throw ConfigError("geometry.ly: must be positive");
    if (s.nx < 1) throw ConfigError("geometry.nx: must be at least 1");
    if (s.ny < 1) throw ConfigError("geometry.ny: must be at least 1");
    if (s.coarse_nx < 1 || s.nx % s.coarse_nx != 0) {
        throw ConfigError("geometry.coarse_nx: Nx = " + std::to_string(s.coarse_nx) +
                          " must divide nx = " + std::to_string(s.nx));
    }
    if (s.coarse_ny < 1 || s.ny % s.coarse_ny != 0) {
        throw ConfigError("geometry.coarse_ny: Ny = " + std::to_string(s.coarse_ny) +
                          " must divide ny = " + std::to_string(s.ny));
    }
    if (!(s.end_time > 0.0)) throw ConfigError("time.end_time: must be positive");
    if (s.num_steps < 1) throw ConfigError("time.num_steps: must be at least 1");
    if (s.output_every < 0) throw ConfigError("time.output_every: must be non-negative");
    if (!(s.fluids.mu_w > 0.0)) throw ConfigError("fluids.mu_w: must be positive");
    if (!(s.fluids.mu_n > 0.0)) throw ConfigError("fluids.mu_n: must be positive");
    if (s.order != 0 && s.order != 1) throw ConfigError("dg.order: must be 0 or 1");
    if (!(s.penalty_base > 0.0)) throw ConfigError("dg.penalty_base: must be positive");
    if (!(s.cg_tolerance > 0.0)) throw ConfigError("dg.cg_tolerance: must be positive");
    if (s.cg_max_iterations < 1) throw ConfigError("dg.cg_max_iterations: must be at least 1");
    if (s.initial_saturation < 0.0 || s.initial_saturation > 1.0) {
        throw ConfigError("initial_saturation: must lie in [0, 1]");
    }
    bool dirichlet = false;
    for (int k = 0; k < 4; ++k) {
        const SideConfig& side = s.sides[k];
        dirichlet = dirichlet || side.pressure == PressureBc::kDirichlet;
        if (side.saturation_dirichlet && (side.saturation < 0.0 || side.saturation > 1.0)) {
            throw ConfigError(std::string("boundary.") + to_string(static_cast<Side>(k)) +
                              ".saturation: must lie in [0, 1]");
        }
    }
    if (!dirichlet) {
        throw ConfigError("boundary: at least one side needs a Dirichlet pressure condition");
    }
    const RomConfig& r = s.rom;
    if (r.profiles < 2) throw ConfigError("rom.profiles: M must be at least 2");
    if (r.profile_mode == ProfileMode::kTof && r.profiles < 3) {
        throw ConfigError("rom.profiles: time-of-flight profiles need M >= 3");
    }
    if (!(r.eps_tol >= 0.0)) throw ConfigError("rom.eps_tol: must be non-negative");
    if (!(r.eps_pca >= 0.0)) throw ConfigError("rom.eps_pca: must be non-negative");
    if (r.training_count < 1) throw ConfigError("rom.training_count: must be at least 1");
    if (r.max_basis_size < 1) throw ConfigError("rom.max_basis_size: must be at least 1");
}

}  // namespace

Scenario scenario_from_json(const json& j) {
    Scenario s;
    ObjectReader root(j, "");
    if (const json* g = root.object("geometry")) {
        ObjectReader r(*g, "geometry");
        r.number("lx", s.lx);
        r.number("ly", s.ly);
        r.integer("nx", s.nx);
        r.integer("ny", s.ny);
        r.integer("coarse_nx", s.coarse_nx);
        r.integer("coarse_ny", s.coarse_ny);
    }
    if (const json* t = root.object("time")) {
        ObjectReader r(*t, "time");
        r.number("end_time", s.end_time);
        r.integer("num_steps", s.num_steps);
        r.integer("output_every", s.output_every);
        r.boolean("limiter", s.limiter);
    }
    if (const json* f = root.object("fluids")) {
        ObjectReader r(*f, "fluids");
        r.number("rho_w", s.fluids.rho_w);
        r.number("rho_n", s.fluids.rho_n);
        r.number("mu_w", s.fluids.mu_w);
        r.number("mu_n", s.fluids.mu_n);
    }
    if (const json* g = root.object("gravity")) {
        const std::vector<double> v = number_list(*g, "gravity");
        if (v.size() != 2) throw ConfigError("gravity: expected two components");
        s.gravity = {v[0], v[1]};
    }
    if (const json* k = root.object("permeability")) {
        s.permeability = read_field(*k, "permeability", s.permeability);
    }
    if (const json* p = root.object("porosity")) {
        s.porosity = read_field(*p, "porosity", s.porosity);
    }
    if (const json* b = root.object("boundary")) {
        ObjectReader r(*b, "boundary");
        for (Side side : kAllSides) {
            const json* sj = r.object(to_string(side));
            if (sj == nullptr) continue;
            SideConfig& cfg = s.sides[static_cast<int>(side)];
            ObjectReader sr(*sj, r.child(to_string(side)));
            sr.choice("pressure", cfg.pressure,
                      {{"dirichlet", PressureBc::kDirichlet},
                       {"neumann", PressureBc::kNeumann},
                       {"noflow", PressureBc::kNoFlow}});
            sr.number("value", cfg.value);
            if (const json* sat = sr.object("saturation")) {
                if (sat->is_null()) {
                    cfg.saturation_dirichlet = false;
                    cfg.saturation = 0.0;
                } else if (sat->is_number()) {
                    cfg.saturation_dirichlet = true;
                    cfg.saturation = sat->get<double>();
                } else {
                    throw ConfigError(sr.child("saturation") + ": expected a number or null");
                }
            }
        }
    }
    if (const json* q = root.object("sources")) {
        ObjectReader r(*q, "sources");
        r.number("q1", s.q1);
        r.number("q2", s.q2);
    }
    root.number("initial_saturation", s.initial_saturation);
    if (const json* d = root.object("dg")) {
        ObjectReader r(*d, "dg");
        r.integer("order", s.order);
        r.number("penalty_base", s.penalty_base);
        r.choice("weighting", s.weighting,
                 {{"swip", MeanWeighting::kSwip}, {"diffusivity", MeanWeighting::kDiffusivity}});
        r.number("cg_tolerance", s.cg_tolerance);
        r.integer("cg_max_iterations", s.cg_max_iterations);
    }
    if (const json* m = root.object("rom")) {
        ObjectReader r(*m, "rom");
        r.integer("profiles", s.rom.profiles);
        r.number("eps_tol", s.rom.eps_tol);
        r.number("eps_pca", s.rom.eps_pca);
        r.integer("training_count", s.rom.training_count);
        r.unsigned64("seed", s.rom.seed);
        r.integer("max_basis_size", s.rom.max_basis_size);
        r.boolean("use_pca", s.rom.use_pca);
        r.boolean("unit_basis", s.rom.unit_basis);
        r.choice("profile_mode", s.rom.profile_mode,
                 {{"tof", ProfileMode::kTof}, {"snapshots", ProfileMode::kSnapshots}});
        r.choice("reconstruction", s.rom.reconstruction,
                 {{"saturation", ReconstructionMobility::kSaturation},
                  {"parametrized", ReconstructionMobility::kParametrized}});
    }
    validate(s);
    return s;
}

json scenario_to_json(const Scenario& s) {
    json boundary = json::object();
    for (Side side : kAllSides) {
        const SideConfig& c = s.sides[static_cast<int>(side)];
        json sj = {{"pressure", bc_name(c.pressure)}, {"value", c.value}};
        sj["saturation"] = c.saturation_dirichlet ? json(c.saturation) : json(nullptr);
        boundary[to_string(side)] = sj;
    }
    return {
        {"geometry",
         {{"lx", s.lx}, {"ly", s.ly}, {"nx", s.nx}, {"ny", s.ny}, {"coarse_nx", s.coarse_nx},
          {"coarse_ny", s.coarse_ny}}},
        {"time",
         {{"end_time", s.end_time},
          {"num_steps", s.num_steps},
          {"output_every", s.output_every},
          {"limiter", s.limiter}}},
        {"fluids",
         {{"rho_w", s.fluids.rho_w},
          {"rho_n", s.fluids.rho_n},
          {"mu_w", s.fluids.mu_w},
          {"mu_n", s.fluids.mu_n}}},
        {"gravity", {s.gravity.x, s.gravity.y}},
        {"permeability", field_to_json(s.permeability)},
        {"porosity", field_to_json(s.porosity)},
        {"boundary", boundary},
        {"sources", {{"q1", s.q1}, {"q2", s.q2}}},
        {"initial_saturation", s.initial_saturation},
        {"dg",
         {{"order", s.order},
          {"penalty_base", s.penalty_base},
          {"weighting", s.weighting == MeanWeighting::kSwip ? "swip" : "diffusivity"},
          {"cg_tolerance", s.cg_tolerance},
          {"cg_max_iterations", s.cg_max_iterations}}},
        {"rom",
         {{"profiles", s.rom.profiles},
          {"eps_tol", s.rom.eps_tol},
          {"eps_pca", s.rom.eps_pca},
          {"training_count", s.rom.training_count},
          {"seed", s.rom.seed},
          {"max_basis_size", s.rom.max_basis_size},
          {"use_pca", s.rom.use_pca},
          {"unit_basis", s.rom.unit_basis},
          {"profile_mode", s.rom.profile_mode == ProfileMode::kTof ? "tof" : "snapshots"},
          {"reconstruction", s.rom.reconstruction == ReconstructionMobility::kSaturation
                                 ? "saturation"
                                 : "parametrized"}}},
    };
}

Scenario parse_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    Scenario s = scenario_from_json(j);
    resolve_paths(s, std::filesystem::path(path).parent_path().string());
    return s;
}

void resolve_paths(Scenario& s, const std::string& base_dir) {
    for (FieldGenerator* g : {&s.permeability, &s.porosity}) {
        if (g->kind == FieldGenerator::Kind::kFile && !g->path.empty() &&
            std::filesystem::path(g->path).is_relative() && !base_dir.empty()) {
            g->path = (std::filesystem::path(base_dir) / g->path).string();
        }
    }
}

FlowProblem build_problem(const Scenario& s) {
    validate(s);
    BoundarySpec spec;
    for (Side side : kAllSides) {
        const SideConfig& c = s.sides[static_cast<int>(side)];
        spec[side] = SideTag{c.pressure, c.saturation_dirichlet};
    }
    FlowProblem pb{.grid = FineGrid(s.lx, s.ly, s.nx, s.ny, spec)};
    pb.permeability = generate_field(s.permeability, pb.grid, "permeability");
    pb.porosity = generate_field(s.porosity, pb.grid, "porosity");
    pb.fluids = s.fluids;
    pb.gravity = s.gravity;
    for (Side side : kAllSides) {
        const SideConfig& c = s.sides[static_cast<int>(side)];
        const double value = c.value;
        if (c.pressure != PressureBc::kNoFlow) {
            pb.boundary.pressure[static_cast<int>(side)] = [value](Point) { return value; };
        }
        pb.boundary.saturation[static_cast<int>(side)] = c.saturation;
    }
    if (s.q1 != 0.0) pb.pressure_source = [q = s.q1](Point) { return q; };
    if (s.q2 != 0.0) pb.saturation_source = [q = s.q2](Point) { return q; };
    pb.order = s.order;
    pb.penalty_base = s.penalty_base;
    pb.mean_weighting = s.weighting;
    pb.cg = CgOptions{s.cg_tolerance, s.cg_max_iterations};
    pb.validate();
    return pb;
}

CoarseGrid build_coarse(const Scenario& s, const FineGrid& grid) {
    return CoarseGrid(grid, s.coarse_nx, s.coarse_ny);
}

TimeStepping build_stepping(const Scenario& s) {
    TimeStepping t;
    t.end_time = s.end_time;
    t.num_steps = s.num_steps;
    t.limiter = s.limiter;
    if (s.initial_saturation != 0.0) {
        t.initial_saturation = [v = s.initial_saturation](Point) { return v; };
    }
    return t;
}

OfflineConfig build_offline_config(const Scenario& s, int threads) {
    OfflineConfig c;
    c.profiles = s.rom.profiles;
    c.end_time = s.end_time;
    c.mode = s.rom.profile_mode;
    if (s.initial_saturation != 0.0) {
        c.initial_saturation = [v = s.initial_saturation](Point) { return v; };
    }
    c.training_count = s.rom.training_count;
    c.seed = s.rom.seed;
    c.greedy.tolerance = s.rom.eps_tol;
    c.greedy.max_basis_size = s.rom.max_basis_size;
    c.greedy.unit_basis = s.rom.unit_basis;
    c.greedy.threads = threads;
    c.use_pca = s.rom.use_pca;
    c.eps_pca = s.rom.eps_pca;
    return c;
}

}  // namespace lrbms::app
