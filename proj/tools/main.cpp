// Command-line front end: every experiment reachable with seeded
// determinism, JSON/CSV emission and optional JSON config files.
// Exit codes: 0 success, 1 domain error (error JSON on stderr), 2 usage.
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcollapse/qcollapse.hpp"

namespace {

using nlohmann::json;
using namespace qcollapse;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr double kDegree = 3.14159265358979323846 / 180.0;

struct CommonOpts {
    std::string format = "json";
    std::string out_path;
    std::string config_path;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, CommonOpts& c) {
    sub->add_option("--format", c.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", c.out_path, "write output to this file instead of stdout");
    sub->add_option("--config", c.config_path, "JSON file with parameters; flags win");
    sub->add_option("--seed", c.seed, "random seed for sampled questions");
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file: " + path);
    json cfg = json::parse(in);  // parse errors surface as usage errors
    if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
    return cfg;
}

void check_keys(const json& cfg, const std::vector<std::string>& allowed) {
    for (const auto& item : cfg.items()) {
        bool ok = false;
        for (const std::string& k : allowed) ok = ok || k == item.key();
        if (!ok) throw UsageError("unknown config key: " + item.key());
    }
}

/// Flag beats config file beats compiled default.
template <typename T>
void fill(const CLI::Option* opt, const json& cfg, const char* key, T& var) {
    if (opt->count() > 0 || !cfg.contains(key)) return;
    var = cfg.at(key).get<T>();
}

void emit(const JsonValue& doc, const std::vector<std::string>& header,
          const std::vector<std::vector<std::string>>& rows, const CommonOpts& c) {
    std::ostringstream body;
    if (c.format == "csv") {
        write_csv(body, header, rows);
    } else {
        body << doc.dump_string();
    }
    if (c.out_path.empty()) {
        std::cout << body.str();
        return;
    }
    std::ofstream out(c.out_path, std::ios::binary);
    if (!out) throw Error("cannot open output path: " + c.out_path);
    out << body.str();
    if (!out) throw Error("write failed: " + c.out_path);
}

std::vector<std::vector<std::string>> metric_rows(
        const std::vector<std::pair<std::string, std::string>>& kv) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(kv.size());
    for (const auto& [k, v] : kv) rows.push_back({k, v});
    return rows;
}

// ---------------------------------------------------------------- zeno

struct ZenoCli {
    CommonOpts common;
    std::string preset;
    double x = 1.0, y = 1.0;
    double z_re = 1.0, z_im = 0.0;
    double c_re = std::sqrt(0.5), c_im = 0.0;
    double s_re = std::sqrt(0.5), s_im = 0.0;
    const CLI::Option *ox = nullptr, *oy = nullptr, *ozr = nullptr, *ozi = nullptr,
                      *ocr = nullptr, *oci = nullptr, *osr = nullptr, *osi = nullptr;
};

void run_zeno(ZenoCli& a) {
    if (!a.preset.empty() && a.preset != "zeno-paper") {
        throw UsageError("unknown zeno preset: " + a.preset);
    }
    const json cfg = load_config(a.common.config_path);
    check_keys(cfg, {"x", "y", "z_re", "z_im", "c_re", "c_im", "s_re", "s_im"});
    fill(a.ox, cfg, "x", a.x);
    fill(a.oy, cfg, "y", a.y);
    fill(a.ozr, cfg, "z_re", a.z_re);
    fill(a.ozi, cfg, "z_im", a.z_im);
    fill(a.ocr, cfg, "c_re", a.c_re);
    fill(a.oci, cfg, "c_im", a.c_im);
    fill(a.osr, cfg, "s_re", a.s_re);
    fill(a.osi, cfg, "s_im", a.s_im);

    ZenoParams p;
    p.x = a.x;
    p.y = a.y;
    p.z = complex(a.z_re, a.z_im);
    p.c = complex(a.c_re, a.c_im);
    p.s = complex(a.s_re, a.s_im);

    const ZenoReadout free_run = zeno_matrix_run(p, false);
    const ZenoReadout asked = zeno_matrix_run(p, true);
    const double cf_free = zeno_closed_form(p, false);
    const double cf_asked = zeno_closed_form(p, true);

    JsonValue params = JsonValue::object();
    params.set("x", JsonValue::num(p.x));
    params.set("y", JsonValue::num(p.y));
    params.set("z_re", JsonValue::num(a.z_re)).set("z_im", JsonValue::num(a.z_im));
    params.set("c_re", JsonValue::num(a.c_re)).set("c_im", JsonValue::num(a.c_im));
    params.set("s_re", JsonValue::num(a.s_re)).set("s_im", JsonValue::num(a.s_im));
    params.set("r", JsonValue::num(ZenoParams::r));

    auto arm = [](const ZenoReadout& r, double closed) {
        JsonValue v = JsonValue::object();
        v.set("w_initial", JsonValue::num(r.w_initial));
        v.set("w_after_u", JsonValue::num(r.w_after_u));
        v.set("w_final", JsonValue::num(r.w_final));
        v.set("closed_form", JsonValue::num(closed));
        return v;
    };

    JsonValue doc = JsonValue::object();
    doc.set("command", JsonValue::str("zeno"));
    doc.set("params", std::move(params));
    doc.set("trace_total", JsonValue::num(p.x + p.y));
    doc.set("uncollapsed", arm(free_run, cf_free));
    doc.set("collapsed", arm(asked, cf_asked));
    doc.set("advantage", JsonValue::num(asked.w_final - free_run.w_final));

    const auto rows = metric_rows({
        {"uncollapsed_w_initial", format_number(free_run.w_initial)},
        {"uncollapsed_w_after_u", format_number(free_run.w_after_u)},
        {"uncollapsed_w_final", format_number(free_run.w_final)},
        {"uncollapsed_closed_form", format_number(cf_free)},
        {"collapsed_w_initial", format_number(asked.w_initial)},
        {"collapsed_w_after_u", format_number(asked.w_after_u)},
        {"collapsed_w_final", format_number(asked.w_final)},
        {"collapsed_closed_form", format_number(cf_asked)},
        {"advantage", format_number(asked.w_final - free_run.w_final)},
    });
    emit(doc, {"metric", "value"}, rows, a.common);
}

// -------------------------------------------------------------- synapse

struct SynapseCli {
    CommonOpts common;
    double mass = SynapseParams{}.ion_mass;
    double temperature = SynapseParams{}.temperature;
    double channel = SynapseParams{}.channel_diameter;
    double distance = SynapseParams{}.travel_distance;
    double synapses = 20.0;
    const CLI::Option *om = nullptr, *ot = nullptr, *oc = nullptr, *od = nullptr,
                      *on = nullptr;
};

void run_synapse(SynapseCli& a) {
    const json cfg = load_config(a.common.config_path);
    check_keys(cfg, {"ion_mass", "temperature", "channel_diameter", "travel_distance",
                     "synapses"});
    fill(a.om, cfg, "ion_mass", a.mass);
    fill(a.ot, cfg, "temperature", a.temperature);
    fill(a.oc, cfg, "channel_diameter", a.channel);
    fill(a.od, cfg, "travel_distance", a.distance);
    fill(a.on, cfg, "synapses", a.synapses);

    SynapseParams p;
    p.ion_mass = a.mass;
    p.temperature = a.temperature;
    p.channel_diameter = a.channel;
    p.travel_distance = a.distance;
    const SynapseEstimates e = synapse_estimates(p);
    const double branches = branch_count_log10(a.synapses);

    JsonValue params = JsonValue::object();
    params.set("ion_mass", JsonValue::num(p.ion_mass));
    params.set("temperature", JsonValue::num(p.temperature));
    params.set("channel_diameter", JsonValue::num(p.channel_diameter));
    params.set("travel_distance", JsonValue::num(p.travel_distance));
    params.set("synapses", JsonValue::num(a.synapses));

    JsonValue doc = JsonValue::object();
    doc.set("command", JsonValue::str("synapse"));
    doc.set("params", std::move(params));
    doc.set("delta_v", JsonValue::num(e.delta_v));
    doc.set("v_thermal", JsonValue::num(e.v_thermal));
    doc.set("velocity_ratio", JsonValue::num(e.velocity_ratio));
    doc.set("transit_time", JsonValue::num(e.transit_time));
    doc.set("spread", JsonValue::num(e.spread));
    doc.set("branch_count_log10", JsonValue::num(branches));

    const auto rows = metric_rows({
        {"delta_v", format_number(e.delta_v)},
        {"v_thermal", format_number(e.v_thermal)},
        {"velocity_ratio", format_number(e.velocity_ratio)},
        {"transit_time", format_number(e.transit_time)},
        {"spread", format_number(e.spread)},
        {"branch_count_log10", format_number(branches)},
    });
    emit(doc, {"metric", "value"}, rows, a.common);
}

// -------------------------------------------------------------- lattice

struct LatticeCli {
    CommonOpts common;
    std::string preset;
    std::uint64_t nx = 2, ny = 2, nz = 1, fields = 1, values = 2;
    std::string rule = "xor";
    std::uint64_t steps = 1;
    std::string initial = "uniform";
    const CLI::Option *onx = nullptr, *ony = nullptr, *onz = nullptr, *of = nullptr,
                      *ov = nullptr, *orl = nullptr, *ost = nullptr, *oin = nullptr;
};

SuperpositionState initial_state(const LatticeConfig& cfg, const std::string& spec_str) {
    if (spec_str == "uniform") return uniform_superposition(cfg);
    const std::string prefix = "basis:";
    if (spec_str.rfind(prefix, 0) == 0) {
        std::size_t pos = 0;
        unsigned long long idx = 0;
        try {
            idx = std::stoull(spec_str.substr(prefix.size()), &pos);
        } catch (const std::exception&) {
            throw UsageError("bad basis index in --initial: " + spec_str);
        }
        if (pos != spec_str.size() - prefix.size()) {
            throw UsageError("bad basis index in --initial: " + spec_str);
        }
        return basis_superposition(cfg, config_from_index(cfg, idx));
    }
    throw UsageError("--initial must be 'uniform' or 'basis:<index>'");
}

std::vector<PatternCell> pattern_from_json(const json& arr) {
    if (!arr.is_array()) throw UsageError("pattern must be an array of cells");
    std::vector<PatternCell> cells;
    for (const json& c : arr) {
        if (!c.is_object()) throw UsageError("pattern cell must be a JSON object");
        check_keys(c, {"x", "y", "field", "value"});
        PatternCell cell;
        cell.x = c.value("x", 0ull);
        cell.y = c.value("y", 0ull);
        cell.field = c.value("field", 0ull);
        if (!c.contains("value")) throw UsageError("pattern cell needs a value");
        cell.value = c.at("value").get<unsigned long long>();
        cells.push_back(cell);
    }
    return cells;
}

void run_glyph_preset(const LatticeCli& a) {
    const LatticeConfig board = m_glyph_lattice();
    const std::vector<PatternCell> glyph = m_glyph_pattern();
    std::size_t strokes = 0;
    for (const PatternCell& c : glyph) strokes += c.value;
    const double space = config_space_log10(board);
    // 25 pinned binary cells: one configuration in 2^25 matches
    const double match = -space;

    JsonValue params = JsonValue::object();
    params.set("nx", JsonValue::uinteger(board.nx));
    params.set("ny", JsonValue::uinteger(board.ny));
    params.set("nz", JsonValue::uinteger(board.nz));
    params.set("fields", JsonValue::uinteger(board.fields));
    params.set("values", JsonValue::uinteger(board.values));
    params.set("rule", JsonValue::str(rule_name(board.rule)));

    JsonValue doc = JsonValue::object();
    doc.set("command", JsonValue::str("lattice"));
    doc.set("preset", JsonValue::str("m-glyph-5x5"));
    doc.set("params", std::move(params));
    doc.set("config_space_log10", JsonValue::num(space));
    doc.set("pattern_cells", JsonValue::uinteger(glyph.size()));
    doc.set("pattern_strokes", JsonValue::uinteger(strokes));
    doc.set("uniform_match_prob_log10", JsonValue::num(match));

    const auto rows = metric_rows({
        {"config_space_log10", format_number(space)},
        {"pattern_cells", std::to_string(glyph.size())},
        {"pattern_strokes", std::to_string(strokes)},
        {"uniform_match_prob_log10", format_number(match)},
    });
    emit(doc, {"metric", "value"}, rows, a.common);
}

void run_lattice(LatticeCli& a) {
    if (!a.preset.empty()) {
        if (a.preset != "m-glyph-5x5") throw UsageError("unknown lattice preset: " + a.preset);
        for (const CLI::Option* o : {a.onx, a.ony, a.onz, a.of, a.ov, a.orl, a.ost, a.oin}) {
            if (o->count() > 0) {
                throw UsageError("--preset m-glyph-5x5 takes no other lattice flags");
            }
        }
        run_glyph_preset(a);
        return;
    }

    const json cfg = load_config(a.common.config_path);
    check_keys(cfg, {"nx", "ny", "nz", "fields", "values", "rule", "steps", "initial",
                     "pattern"});
    fill(a.onx, cfg, "nx", a.nx);
    fill(a.ony, cfg, "ny", a.ny);
    fill(a.onz, cfg, "nz", a.nz);
    fill(a.of, cfg, "fields", a.fields);
    fill(a.ov, cfg, "values", a.values);
    fill(a.orl, cfg, "rule", a.rule);
    fill(a.ost, cfg, "steps", a.steps);
    fill(a.oin, cfg, "initial", a.initial);

    LatticeConfig board;
    board.nx = a.nx;
    board.ny = a.ny;
    board.nz = a.nz;
    board.fields = a.fields;
    board.values = a.values;
    board.rule = parse_rule(a.rule);
    board.validate();

    SuperpositionState state = initial_state(board, a.initial);
    for (std::uint64_t k = 0; k < a.steps; ++k) state = quantum_step(board, state);

    JsonValue params = JsonValue::object();
    params.set("nx", JsonValue::uinteger(board.nx));
    params.set("ny", JsonValue::uinteger(board.ny));
    params.set("nz", JsonValue::uinteger(board.nz));
    params.set("fields", JsonValue::uinteger(board.fields));
    params.set("values", JsonValue::uinteger(board.values));
    params.set("rule", JsonValue::str(a.rule));
    params.set("steps", JsonValue::uinteger(a.steps));
    params.set("initial", JsonValue::str(a.initial));

    JsonValue doc = JsonValue::object();
    doc.set("command", JsonValue::str("lattice"));
    doc.set("seed", JsonValue::uinteger(a.common.seed));
    doc.set("params", std::move(params));
    doc.set("config_space_log10", JsonValue::num(config_space_log10(board)));
    doc.set("total_configs", JsonValue::uinteger(board.total_configs()));
    doc.set("norm2", JsonValue::num(state.norm2()));

    if (cfg.contains("pattern")) {
        const std::vector<PatternCell> cells = pattern_from_json(cfg.at("pattern"));
        const DiagonalProjector proj = pattern_projector(board, cells);
        RandomEngine rng(a.common.seed);
        const GestaltOutcome out = gestalt_collapse(state, proj, rng);
        JsonValue g = JsonValue::object();
        g.set("pattern_cells", JsonValue::uinteger(cells.size()));
        g.set("rank", JsonValue::uinteger(proj.rank()));
        g.set("prob_yes", JsonValue::num(out.prob_yes));
        g.set("weight_yes", JsonValue::num(out.weight_yes));
        g.set("weight_no", JsonValue::num(out.weight_no));
        g.set("answer", JsonValue::boolean(out.yes));
        doc.set("gestalt", std::move(g));
        state = out.collapsed;
    }

    JsonValue amps = JsonValue::array();
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < state.dim(); ++i) {
        const complex c = state.amplitudes()[i];
        JsonValue entry = JsonValue::array();
        entry.push(JsonValue::uinteger(i));
        entry.push(JsonValue::num(c.real()));
        entry.push(JsonValue::num(c.imag()));
        amps.push(std::move(entry));
        rows.push_back({std::to_string(i), format_number(c.real()), format_number(c.imag())});
    }
    doc.set("state", std::move(amps));

    emit(doc, {"index", "re", "im"}, rows, a.common);
}

// ------------------------------------------------------------- nonlocal

struct NonlocalCli {
    CommonOpts common;
    std::string preset;
    double visibility = 1.0;
    std::vector<double> left_deg = {0.0, 90.0};
    std::vector<double> right_deg = {45.0, 135.0};
    const CLI::Option *ovis = nullptr, *ol = nullptr, *orr = nullptr;
};

void run_nonlocal(NonlocalCli& a) {
    if (!a.preset.empty() && a.preset != "singlet-chsh") {
        throw UsageError("unknown nonlocal preset: " + a.preset);
    }
    const json cfg = load_config(a.common.config_path);
    check_keys(cfg, {"visibility", "left_angles_deg", "right_angles_deg"});
    fill(a.ovis, cfg, "visibility", a.visibility);
    fill(a.ol, cfg, "left_angles_deg", a.left_deg);
    fill(a.orr, cfg, "right_angles_deg", a.right_deg);
    if (a.left_deg.size() != 2 || a.right_deg.size() != 2) {
        throw UsageError("each side needs exactly two measurement angles");
    }

    std::vector<BinaryMeasurement> left{qubit_measurement(a.left_deg[0] * kDegree),
                                        qubit_measurement(a.left_deg[1] * kDegree)};
    std::vector<BinaryMeasurement> right{qubit_measurement(a.right_deg[0] * kDegree),
                                         qubit_measurement(a.right_deg[1] * kDegree)};
    const BipartiteExperiment exp(noisy_singlet(a.visibility), std::move(left),
                                  std::move(right));
    const CorrelationTable table = joint_probs(exp);
    const LocalModelVerdict v = local_model_check(table);

    JsonValue params = JsonValue::object();
    params.set("visibility", JsonValue::num(a.visibility));
    JsonValue la = JsonValue::array();
    la.push(JsonValue::num(a.left_deg[0])).push(JsonValue::num(a.left_deg[1]));
    JsonValue ra = JsonValue::array();
    ra.push(JsonValue::num(a.right_deg[0])).push(JsonValue::num(a.right_deg[1]));
    params.set("left_angles_deg", std::move(la));
    params.set("right_angles_deg", std::move(ra));

    JsonValue correlators = JsonValue::array();
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) correlators.push(JsonValue::num(table.correlator(x, y)));

    JsonValue combos = JsonValue::array();
    for (double c : v.chsh_values) combos.push(JsonValue::num(c));

    JsonValue signs = JsonValue::array();
    for (int s : v.witness_signs) signs.push(JsonValue::integer(s));

    JsonValue doc = JsonValue::object();
    doc.set("command", JsonValue::str("nonlocal"));
    doc.set("params", std::move(params));
    doc.set("correlators", std::move(correlators));
    doc.set("chsh_values", std::move(combos));
    doc.set("local_bound", JsonValue::num(v.local_bound));
    doc.set("max_abs_chsh", JsonValue::num(v.max_abs_chsh));
    doc.set("locally_explainable", JsonValue::boolean(v.locally_explainable));
    doc.set("lp_feasible", JsonValue::boolean(v.lp_feasible));
    doc.set("witness_signs", std::move(signs));
    doc.set("witness_value", JsonValue::num(v.witness_value));
    if (v.lp_feasible) {
        JsonValue mix = JsonValue::array();
        for (double w : v.mixture) mix.push(JsonValue::num(w));
        doc.set("mixture", std::move(mix));
    }
    doc.set("report", JsonValue::str(loc_report(v)));

    std::vector<std::pair<std::string, std::string>> kv = {
        {"max_abs_chsh", format_number(v.max_abs_chsh)},
        {"local_bound", format_number(v.local_bound)},
        {"locally_explainable", v.locally_explainable ? "true" : "false"},
        {"lp_feasible", v.lp_feasible ? "true" : "false"},
        {"witness_value", format_number(v.witness_value)},
    };
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            kv.push_back({"correlator_" + std::to_string(x) + std::to_string(y),
                          format_number(table.correlator(x, y))});
        }
    for (std::size_t k = 0; k < 8; ++k) {
        kv.push_back({"chsh_" + std::to_string(k), format_number(v.chsh_values[k])});
    }
    emit(doc, {"metric", "value"}, metric_rows(kv), a.common);
}

// ---------------------------------------------------------------- trace

struct TraceCli {
    CommonOpts common;
    std::uint64_t segments = 4;
    double dt = 0.5;
    double rate = 0.7853981633974483;  // quarter-turn generator
    const CLI::Option *os = nullptr, *od = nullptr, *orr = nullptr;
};

void run_trace(TraceCli& a) {
    const json cfg = load_config(a.common.config_path);
    check_keys(cfg, {"segments", "dt", "rate"});
    fill(a.os, cfg, "segments", a.segments);
    fill(a.od, cfg, "dt", a.dt);
    fill(a.orr, cfg, "rate", a.rate);
    if (!(a.dt >= 0.0)) throw UsageError("--dt must be nonnegative");

    // two-level system nutating under a sigma-x generator, asked "still in
    // the start state?" after every segment
    ComplexMatrix h(2, 2);
    h(0, 1) = a.rate;
    h(1, 0) = a.rate;
    const ComplexMatrix u = unitary_from_hamiltonian(h, a.dt);
    const Projector start = Projector::basis_state(2, 0);

    ProcessTrace run(DensityState::pure({complex(1.0, 0.0), complex(0.0, 0.0)}));
    RandomEngine rng(a.common.seed);
    for (std::uint64_t k = 0; k < a.segments; ++k) {
        run.evolve_segment(u, a.dt);
        run.pose_question(start, rng);
    }

    JsonValue params = JsonValue::object();
    params.set("segments", JsonValue::uinteger(a.segments));
    params.set("dt", JsonValue::num(a.dt));
    params.set("rate", JsonValue::num(a.rate));

    JsonValue events = JsonValue::array();
    for (const TraceEvent& e : run.events()) {
        JsonValue ev = JsonValue::object();
        ev.set("kind", JsonValue::str(e.kind == EventKind::Segment ? "segment" : "question"));
        ev.set("t", JsonValue::num(e.time_after));
        ev.set("i", JsonValue::uinteger(e.index_after));
        ev.set("weight_before", JsonValue::num(e.weight_before));
        ev.set("weight_after", JsonValue::num(e.weight_after));
        if (e.kind == EventKind::Question) {
            ev.set("prob_yes", JsonValue::num(e.prob_yes));
            ev.set("answer", JsonValue::boolean(e.yes));
        }
        events.push(std::move(ev));
    }

    JsonValue stairs = JsonValue::array();
    std::vector<std::vector<std::string>> rows;
    for (const StairPoint& pt : run.staircase()) {
        JsonValue pair = JsonValue::array();
        pair.push(JsonValue::num(pt.time));
        pair.push(JsonValue::uinteger(pt.index));
        stairs.push(std::move(pair));
        rows.push_back({format_number(pt.time), std::to_string(pt.index)});
    }

    JsonValue doc = JsonValue::object();
    doc.set("command", JsonValue::str("trace"));
    doc.set("seed", JsonValue::uinteger(a.common.seed));
    doc.set("params", std::move(params));
    doc.set("events", std::move(events));
    doc.set("staircase", std::move(stairs));
    doc.set("final_weight", JsonValue::num(run.state().weight()));

    emit(doc, {"t", "i"}, rows, a.common);
}

// ------------------------------------------------------------ selection

struct SelectionCli {
    CommonOpts common;
    double x = 1.0, y = 1.0;
    double z_re = 1.0, z_im = 0.0;
    double c_re = std::sqrt(0.5), c_im = 0.0;
    double s_re = std::sqrt(0.5), s_im = 0.0;
    std::uint64_t trials = 100000;
    unsigned threads = 1;
    const CLI::Option *ox = nullptr, *oy = nullptr, *ozr = nullptr, *ozi = nullptr,
                      *ocr = nullptr, *oci = nullptr, *osr = nullptr, *osi = nullptr,
                      *otr = nullptr;
};

void run_selection(SelectionCli& a) {
    const json cfg = load_config(a.common.config_path);
    check_keys(cfg, {"x", "y", "z_re", "z_im", "c_re", "c_im", "s_re", "s_im", "trials"});
    fill(a.ox, cfg, "x", a.x);
    fill(a.oy, cfg, "y", a.y);
    fill(a.ozr, cfg, "z_re", a.z_re);
    fill(a.ozi, cfg, "z_im", a.z_im);
    fill(a.ocr, cfg, "c_re", a.c_re);
    fill(a.oci, cfg, "c_im", a.c_im);
    fill(a.osr, cfg, "s_re", a.s_re);
    fill(a.osi, cfg, "s_im", a.s_im);
    fill(a.otr, cfg, "trials", a.trials);

    ZenoParams p;
    p.x = a.x;
    p.y = a.y;
    p.z = complex(a.z_re, a.z_im);
    p.c = complex(a.c_re, a.c_im);
    p.s = complex(a.s_re, a.s_im);

    // thread count shapes the schedule, never the tallies; it is left out
    // of the emitted document on purpose
    const SelectionResult r = selection_advantage_mc(p, a.trials, a.common.seed, a.threads);

    JsonValue params = JsonValue::object();
    params.set("x", JsonValue::num(p.x));
    params.set("y", JsonValue::num(p.y));
    params.set("z_re", JsonValue::num(a.z_re)).set("z_im", JsonValue::num(a.z_im));
    params.set("c_re", JsonValue::num(a.c_re)).set("c_im", JsonValue::num(a.c_im));
    params.set("s_re", JsonValue::num(a.s_re)).set("s_im", JsonValue::num(a.s_im));
    params.set("trials", JsonValue::uinteger(r.n_trials));

    JsonValue doc = JsonValue::object();
    doc.set("command", JsonValue::str("selection"));
    doc.set("seed", JsonValue::uinteger(a.common.seed));
    doc.set("params", std::move(params));
    doc.set("prob_with_questions", JsonValue::num(r.prob_with_questions));
    doc.set("prob_without", JsonValue::num(r.prob_without));
    doc.set("hits_with_questions", JsonValue::uinteger(r.hits_with_questions));
    doc.set("hits_without", JsonValue::uinteger(r.hits_without));
    doc.set("rate_with_questions", JsonValue::num(r.rate_with_questions));
    doc.set("rate_without", JsonValue::num(r.rate_without));

    const auto rows = metric_rows({
        {"prob_with_questions", format_number(r.prob_with_questions)},
        {"prob_without", format_number(r.prob_without)},
        {"hits_with_questions", std::to_string(r.hits_with_questions)},
        {"hits_without", std::to_string(r.hits_without)},
        {"rate_with_questions", format_number(r.rate_with_questions)},
        {"rate_without", format_number(r.rate_without)},
    });
    emit(doc, {"metric", "value"}, rows, a.common);
}

int fail_domain(const std::string& type, const std::string& message) {
    JsonValue err = JsonValue::object();
    JsonValue body = JsonValue::object();
    body.set("type", JsonValue::str(type));
    body.set("message", JsonValue::str(message));
    err.set("error", std::move(body));
    std::cerr << err.dump_string();
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"collapse-dynamics toolbox: density-matrix questions, lattice "
                 "patterns and locality tests"};
    app.require_subcommand(1);

    ZenoCli zeno;
    CLI::App* zs = app.add_subcommand("zeno", "three-level readout with and without "
                                              "an early question");
    add_common(zs, zeno.common);
    zs->add_option("--preset", zeno.preset, "zeno-paper");
    zeno.ox = zs->add_option("--x", zeno.x, "population of state 1");
    zeno.oy = zs->add_option("--y", zeno.y, "population of state 2");
    zeno.ozr = zs->add_option("--z-re,--z", zeno.z_re, "coherence, real part");
    zeno.ozi = zs->add_option("--z-im", zeno.z_im, "coherence, imaginary part");
    zeno.ocr = zs->add_option("--c-re", zeno.c_re, "mixer diagonal, real part");
    zeno.oci = zs->add_option("--c-im", zeno.c_im, "mixer diagonal, imaginary part");
    zeno.osr = zs->add_option("--s-re", zeno.s_re, "mixer off-diagonal, real part");
    zeno.osi = zs->add_option("--s-im", zeno.s_im, "mixer off-diagonal, imaginary part");
    zs->callback([&] { run_zeno(zeno); });

    SynapseCli synapse;
    CLI::App* ss = app.add_subcommand("synapse", "wave-packet spreading scales for a "
                                                 "channeled ion");
    add_common(ss, synapse.common);
    synapse.om = ss->add_option("--ion-mass", synapse.mass, "kg");
    synapse.ot = ss->add_option("--temperature", synapse.temperature, "K");
    synapse.oc = ss->add_option("--channel-diameter", synapse.channel, "m");
    synapse.od = ss->add_option("--travel-distance", synapse.distance, "m");
    synapse.on = ss->add_option("--synapses", synapse.synapses,
                                "independent two-state sites for the branch count");
    ss->callback([&] { run_synapse(synapse); });

    LatticeCli lattice;
    CLI::App* ls = app.add_subcommand("lattice", "classical automaton lifted to a "
                                                 "superposition with pattern questions");
    add_common(ls, lattice.common);
    ls->add_option("--preset", lattice.preset, "m-glyph-5x5");
    lattice.onx = ls->add_option("--nx", lattice.nx, "sites along x");
    lattice.ony = ls->add_option("--ny", lattice.ny, "sites along y");
    lattice.onz = ls->add_option("--nz", lattice.nz, "sites along z");
    lattice.of = ls->add_option("--fields", lattice.fields, "digits per site");
    lattice.ov = ls->add_option("--values", lattice.values, "values per digit");
    lattice.orl = ls->add_option("--rule", lattice.rule, "xor|identity|zero");
    lattice.ost = ls->add_option("--steps", lattice.steps, "automaton ticks");
    lattice.oin = ls->add_option("--initial", lattice.initial, "uniform or basis:<index>");
    ls->callback([&] { run_lattice(lattice); });

    NonlocalCli nonlocal;
    CLI::App* ns = app.add_subcommand("nonlocal", "two-region correlation tables "
                                                  "against all local models");
    add_common(ns, nonlocal.common);
    ns->add_option("--preset", nonlocal.preset, "singlet-chsh");
    nonlocal.ovis = ns->add_option("--visibility", nonlocal.visibility,
                                   "singlet fraction, rest white noise");
    nonlocal.ol = ns->add_option("--left-angles", nonlocal.left_deg,
                                 "two left axes in degrees")->expected(2);
    nonlocal.orr = ns->add_option("--right-angles", nonlocal.right_deg,
                                  "two right axes in degrees")->expected(2);
    ns->callback([&] { run_nonlocal(nonlocal); });

    TraceCli trace;
    CLI::App* ts = app.add_subcommand("trace", "two-clock staircase of segments and "
                                               "sampled questions");
    add_common(ts, trace.common);
    trace.os = ts->add_option("--segments", trace.segments, "number of evolve+ask rounds");
    trace.od = ts->add_option("--dt", trace.dt, "smooth time per segment");
    trace.orr = ts->add_option("--rate", trace.rate, "generator strength");
    ts->callback([&] { run_trace(trace); });

    SelectionCli selection;
    CLI::App* es = app.add_subcommand("selection", "monte carlo comparison of asking "
                                                   "vs never asking");
    add_common(es, selection.common);
    selection.ox = es->add_option("--x", selection.x, "population of state 1");
    selection.oy = es->add_option("--y", selection.y, "population of state 2");
    selection.ozr = es->add_option("--z-re,--z", selection.z_re, "coherence, real part");
    selection.ozi = es->add_option("--z-im", selection.z_im, "coherence, imaginary part");
    selection.ocr = es->add_option("--c-re", selection.c_re, "mixer diagonal, real part");
    selection.oci = es->add_option("--c-im", selection.c_im, "mixer diagonal, imaginary part");
    selection.osr = es->add_option("--s-re", selection.s_re, "mixer off-diagonal, real part");
    selection.osi = es->add_option("--s-im", selection.s_im, "mixer off-diagonal, imaginary part");
    selection.otr = es->add_option("--trials", selection.trials, "monte carlo trials");
    es->add_option("--threads", selection.threads, "worker threads; does not change output");
    es->callback([&] { run_selection(selection); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // prints help, exit 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "usage error: bad config JSON: " << e.what() << "\n";
        return 2;
    } catch (const ShapeError& e) {
        return fail_domain("shape", e.what());
    } catch (const SizeError& e) {
        return fail_domain("size", e.what());
    } catch (const IndexError& e) {
        return fail_domain("index", e.what());
    } catch (const DegenerateStateError& e) {
        return fail_domain("degenerate", e.what());
    } catch (const ValidationError& e) {
        return fail_domain("validation", e.what());
    } catch (const Error& e) {
        return fail_domain("domain", e.what());
    } catch (const std::exception& e) {
        return fail_domain("internal", e.what());
    }
    return 0;
}
