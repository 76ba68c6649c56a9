// SPDX-License-Identifier: Apache-2.0
#include "icn/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "icn/circuit.hpp"
#include "icn/constants.hpp"
#include "icn/distortion.hpp"
#include "icn/errors.hpp"
#include "icn/format.hpp"
#include "icn/geometry.hpp"
#include "icn/matching.hpp"

namespace icn::pipeline {

using io::json;
using io::StrictObject;

namespace {

void positive(double v, const std::string& what) {
    if (!(v > 0.0)) throw ConfigError(what + ": must be positive");
}

void non_negative(double v, const std::string& what) {
    if (!(v >= 0.0)) throw ConfigError(what + ": must be >= 0");
}

magnetics::TwoPortParams parse_two_port(const StrictObject& o, double f) {
    magnetics::TwoPortParams p;
    p.L1 = o.number("L1_H");
    p.L2 = o.number("L2_H");
    p.M = o.number("M_H");
    p.R1 = o.number("R1_ohm");
    p.R2 = o.number("R2_ohm");
    p.f = f;
    o.finish();
    positive(p.L1, o.path("L1_H"));
    positive(p.L2, o.path("L2_H"));
    non_negative(p.R1, o.path("R1_ohm"));
    non_negative(p.R2, o.path("R2_ohm"));
    if (p.M * p.M >= p.L1 * p.L2) throw ConfigError(o.path("M_H") + ": coupling |k| must be below 1");
    return p;
}

GeometryEnvelope parse_geometry(const StrictObject& o) {
    GeometryEnvelope g;
    g.r_i = o.number("r_i_m");
    g.r_o = o.number("r_o_m");
    g.height = o.number("height_m");
    g.wire_diameter = o.number("wire_diameter_m");
    g.segments = o.integer("segments");
    g.turns_per_segment = o.integer("turns_per_segment");
    g.primary_turns = o.integer("primary_turns");
    g.layers = o.integer("layers", g.layers);
    g.primary_wire_diameter = o.number("primary_wire_diameter_m", g.primary_wire_diameter);
    g.primary_gap = o.number("primary_gap_m", g.primary_gap);
    g.lead_length = o.number("lead_length_m", g.lead_length);
    g.segments_per_turn = o.integer("segments_per_turn", g.segments_per_turn);
    g.return_wire = o.boolean("return_wire", g.return_wire);
    g.R1 = o.number("R1_ohm", g.R1);
    g.R2 = o.number("R2_ohm", g.R2);
    o.finish();
    positive(g.r_i, o.path("r_i_m"));
    if (!(g.r_o > g.r_i)) throw ConfigError(o.path("r_o_m") + ": must exceed r_i_m");
    non_negative(g.height, o.path("height_m"));
    positive(g.wire_diameter, o.path("wire_diameter_m"));
    positive(g.primary_wire_diameter, o.path("primary_wire_diameter_m"));
    positive(g.primary_gap, o.path("primary_gap_m"));
    non_negative(g.lead_length, o.path("lead_length_m"));
    if (g.segments < 1 || g.turns_per_segment < 1 || g.layers < 1 || g.primary_turns < 1)
        throw ConfigError(o.path("segments") + ": winding counts must be >= 1");
    if (g.segments_per_turn < 8) throw ConfigError(o.path("segments_per_turn") + ": must be >= 8");
    return g;
}

json two_port_json(const magnetics::TwoPortParams& p) {
    return {{"L1_H", p.L1}, {"L2_H", p.L2}, {"M_H", p.M}, {"R1_ohm", p.R1}, {"R2_ohm", p.R2}};
}

json geometry_json(const GeometryEnvelope& g) {
    return {{"r_i_m", g.r_i},
            {"r_o_m", g.r_o},
            {"height_m", g.height},
            {"wire_diameter_m", g.wire_diameter},
            {"segments", g.segments},
            {"turns_per_segment", g.turns_per_segment},
            {"primary_turns", g.primary_turns},
            {"layers", g.layers},
            {"primary_wire_diameter_m", g.primary_wire_diameter},
            {"primary_gap_m", g.primary_gap},
            {"lead_length_m", g.lead_length},
            {"segments_per_turn", g.segments_per_turn},
            {"return_wire", g.return_wire},
            {"R1_ohm", g.R1},
            {"R2_ohm", g.R2}};
}

const char* termination_name(decoupling::PrimaryTermination t) {
    return t == decoupling::PrimaryTermination::open ? "open" : "shorted";
}

}  // namespace

magnetics::ToroidalTransformerSpec GeometryEnvelope::transformer_spec(double f) const {
    magnetics::ToroidalTransformerSpec s;
    s.r_i = r_i;
    s.r_o = r_o;
    s.height = height;
    s.segments = segments;
    s.turns_per_segment = turns_per_segment;
    s.layers = layers;
    s.primary_turns = primary_turns;
    s.return_wire = return_wire;
    s.secondary_wire_radius = 0.5 * wire_diameter;
    s.primary_wire_radius = 0.5 * primary_wire_diameter;
    s.primary_gap = primary_gap;
    s.lead_length = lead_length;
    s.segments_per_turn = segments_per_turn;
    s.f = f;
    s.R1 = R1;
    s.R2 = R2;
    return s;
}

RunConfig parse_config(const json& j) {
    StrictObject root(j, "");
    RunConfig c;
    const auto& chans = root.raw("channels");
    if (!chans.is_array() || chans.empty()) throw ConfigError("channels: expected a non-empty array");
    for (std::size_t i = 0; i < chans.size(); ++i) {
        StrictObject o(chans[i], "channels[" + std::to_string(i) + "]");
        ChannelSpec ch;
        ch.name = o.string("name", "ch" + std::to_string(i + 1));
        ch.f = o.number("f_Hz");
        ch.L_Tx = o.number("L_Tx_H");
        ch.R_Tx = o.number("R_Tx_ohm");
        positive(ch.f, o.path("f_Hz"));
        positive(ch.L_Tx, o.path("L_Tx_H"));
        non_negative(ch.R_Tx, o.path("R_Tx_ohm"));
        if (o.has("two_port")) ch.measured = parse_two_port(o.object("two_port"), ch.f);
        if (o.has("geometry")) ch.geometry = parse_geometry(o.object("geometry"));
        o.finish();
        if (!ch.measured && !ch.geometry) throw ConfigError(o.path("two_port") + ": need two_port or geometry");
        c.channels.push_back(std::move(ch));
    }
    const int n = static_cast<int>(c.channels.size());
    if (root.has("coupling")) {
        const auto o = root.object("coupling");
        if (o.has("k_inter")) {
            const auto& m = o.raw("k_inter");
            if (!m.is_array() || static_cast<int>(m.size()) != n)
                throw ConfigError(o.path("k_inter") + ": expected an n x n matrix for n channels");
            c.k_inter = Eigen::MatrixXd::Zero(n, n);
            for (int r = 0; r < n; ++r) {
                if (!m[r].is_array() || static_cast<int>(m[r].size()) != n)
                    throw ConfigError(o.path("k_inter") + ": expected an n x n matrix for n channels");
                for (int s = 0; s < n; ++s) {
                    if (!m[r][s].is_number()) throw ConfigError(o.path("k_inter") + ": expected numbers");
                    c.k_inter(r, s) = m[r][s].get<double>();
                }
            }
            if ((c.k_inter - c.k_inter.transpose()).cwiseAbs().maxCoeff() > 0.0)
                throw ConfigError(o.path("k_inter") + ": must be symmetric");
            for (int r = 0; r < n; ++r) {
                if (c.k_inter(r, r) != 0.0) throw ConfigError(o.path("k_inter") + ": diagonal must be zero");
                for (int s = 0; s < n; ++s)
                    if (!(std::abs(c.k_inter(r, s)) < 1.0)) throw ConfigError(o.path("k_inter") + ": |k| must be below 1");
            }
        }
        try {
            c.scheme = decoupling::scheme_from_string(o.string("scheme", "common_capacitor"));
        } catch (const DomainError& e) {
            throw ConfigError(o.path("scheme") + ": " + e.what());
        }
        const auto v = o.string("victim_primaries", "open");
        if (v == "open")
            c.victims = decoupling::PrimaryTermination::open;
        else if (v == "shorted")
            c.victims = decoupling::PrimaryTermination::shorted;
        else
            throw ConfigError(o.path("victim_primaries") + ": expected \"open\" or \"shorted\"");
        o.finish();
    }
    if (root.has("matching")) {
        const auto o = root.object("matching");
        c.matching.ratio_min = o.number("ratio_min", c.matching.ratio_min);
        c.matching.ratio_max = o.number("ratio_max", c.matching.ratio_max);
        c.matching.points = o.integer("points", c.matching.points);
        o.finish();
        positive(c.matching.ratio_min, o.path("ratio_min"));
        if (!(c.matching.ratio_max > c.matching.ratio_min)) throw ConfigError(o.path("ratio_max") + ": must exceed ratio_min");
        if (c.matching.points < 2) throw ConfigError(o.path("points") + ": must be >= 2");
    }
    if (root.has("sweep")) {
        const auto o = root.object("sweep");
        c.sweep_points = o.integer("points", c.sweep_points);
        c.sweep_span = o.number("span", c.sweep_span);
        o.finish();
        if (c.sweep_points < 3 || c.sweep_points % 2 == 0) throw ConfigError(o.path("points") + ": must be odd and >= 3");
        if (!(c.sweep_span > 0.0 && c.sweep_span < 1.0)) throw ConfigError(o.path("span") + ": must lie in (0, 1)");
    }
    if (root.has("thd")) {
        const auto o = root.object("thd");
        c.thd.sigma = o.number("sigma", c.thd.sigma);
        if (o.has("amplitudes_rel_Hsat")) c.thd.amplitudes = o.numbers("amplitudes_rel_Hsat");
        c.thd.n_harmonics = o.integer("n_harmonics", c.thd.n_harmonics);
        c.thd.amplifier_thd = o.number("amplifier_thd", c.thd.amplifier_thd);
        if (o.has("filter_attenuation_dB")) c.thd.attenuation_db = o.numbers("filter_attenuation_dB");
        o.finish();
        positive(c.thd.sigma, o.path("sigma"));
        if (c.thd.amplitudes.empty()) throw ConfigError(o.path("amplitudes_rel_Hsat") + ": must not be empty");
        for (double a : c.thd.amplitudes) positive(a, o.path("amplitudes_rel_Hsat"));
        if (c.thd.n_harmonics < 5) throw ConfigError(o.path("n_harmonics") + ": must be >= 5");
        non_negative(c.thd.amplifier_thd, o.path("amplifier_thd"));
        if (c.thd.attenuation_db.empty()) throw ConfigError(o.path("filter_attenuation_dB") + ": must not be empty");
    }
    c.output_dir = root.string("output_dir", c.output_dir);
    if (root.has("tolerances")) {
        const auto o = root.object("tolerances");
        c.gain_tolerance = o.number("gain_formula_vs_mna_rel", c.gain_tolerance);
        o.finish();
        positive(c.gain_tolerance, o.path("gain_formula_vs_mna_rel"));
    }
    root.finish();
    return c;
}

json RunConfig::to_json() const {
    json chans = json::array();
    for (const auto& ch : channels) {
        json o = {{"name", ch.name}, {"f_Hz", ch.f}, {"L_Tx_H", ch.L_Tx}, {"R_Tx_ohm", ch.R_Tx}};
        if (ch.measured) o["two_port"] = two_port_json(*ch.measured);
        if (ch.geometry) o["geometry"] = geometry_json(*ch.geometry);
        chans.push_back(o);
    }
    json coupling = {{"scheme", decoupling::to_string(scheme)}, {"victim_primaries", termination_name(victims)}};
    if (k_inter.size() > 0) {
        json m = json::array();
        for (int r = 0; r < k_inter.rows(); ++r) {
            json row = json::array();
            for (int s = 0; s < k_inter.cols(); ++s) row.push_back(k_inter(r, s));
            m.push_back(row);
        }
        coupling["k_inter"] = m;
    }
    return {{"channels", chans},
            {"coupling", coupling},
            {"matching",
             {{"ratio_min", matching.ratio_min}, {"ratio_max", matching.ratio_max}, {"points", matching.points}}},
            {"sweep", {{"points", sweep_points}, {"span", sweep_span}}},
            {"thd",
             {{"sigma", thd.sigma},
              {"amplitudes_rel_Hsat", thd.amplitudes},
              {"n_harmonics", thd.n_harmonics},
              {"amplifier_thd", thd.amplifier_thd},
              {"filter_attenuation_dB", thd.attenuation_db}}},
            {"output_dir", output_dir},
            {"tolerances", {{"gain_formula_vs_mna_rel", gain_tolerance}}}};
}

namespace {

json provenance(const RunConfig& c) {
    return {{"tool_version", kToolVersion}, {"config_sha256", io::sha256_hex(io::dump(c.to_json()))}};
}

json header(const RunConfig& c) { return {{"provenance", provenance(c)}, {"config", c.to_json()}}; }

struct ResolvedChannel {
    const ChannelSpec* spec = nullptr;
    magnetics::TwoPortParams p;       // used for the circuit analysis
    std::string source;               // "measured" or "model"
    std::optional<magnetics::ToroidalTransformer> model;
};

json self_check(const magnetics::ToroidalTransformer& t) {
    const auto cs = magnetics::coupling_summary(t.params);
    double wire1 = 0.0, wire2 = 0.0;
    for (const auto& f : t.primary.filaments) wire1 += f.length();
    for (const auto& f : t.secondary.filaments) wire2 += f.length();
    return {{"two_port", two_port_json(t.params)},
            {"coupling", {{"k", cs.k}, {"K1", cs.K1}, {"K2", cs.K2}, {"n", cs.n}}},
            {"geometry",
             {{"profile_perimeter_m", t.profile.perimeter},
              {"profile_area_m2", t.profile.area},
              {"profile_height_m", t.profile.height()},
              {"secondary_filaments", t.secondary.filaments.size()},
              {"secondary_wire_length_m", wire2},
              {"primary_filaments", t.primary.filaments.size()},
              {"primary_wire_length_m", wire1}}}};
}

std::vector<ResolvedChannel> resolve(const RunConfig& c, bool want_model) {
    std::vector<ResolvedChannel> out;
    for (const auto& ch : c.channels) {
        ResolvedChannel r;
        r.spec = &ch;
        if (ch.geometry && (want_model || !ch.measured))
            r.model = magnetics::build_transformer(ch.geometry->transformer_spec(ch.f));
        if (ch.measured) {
            r.p = *ch.measured;
            r.source = "measured";
        } else {
            r.p = r.model->params;
            r.source = "model";
        }
        out.push_back(std::move(r));
    }
    return out;
}

json complex_json(std::complex<double> z) { return {{"re", z.real()}, {"im", z.imag()}}; }

json analyze_channel(const RunConfig& c, const ResolvedChannel& r, std::map<std::string, std::string>& files) {
    const auto& ch = *r.spec;
    const auto g = circuit::gain_formula(r.p, ch.R_Tx);
    const auto hcr = circuit::build_hcr(r.p, ch.L_Tx, ch.R_Tx, ch.f);
    const auto res = circuit::analyze_hcr(hcr);
    const double mismatch = g.G > 0.0 ? std::abs(res.gain - g.G) / g.G : std::abs(res.gain);
    const auto sols = circuit::solve_ac(hcr.netlist, circuit::default_grid(ch.f, c.sweep_points, c.sweep_span));
    files[ch.name + "_sweep.csv"] = circuit::sweep_csv(hcr.netlist, sols);
    const auto cs = magnetics::coupling_summary(r.p);
    json o = {{"name", ch.name},
              {"two_port_source", r.source},
              {"two_port", two_port_json(r.p)},
              {"coupling", {{"k", cs.k}, {"K1", cs.K1}, {"K2", cs.K2}, {"n", cs.n}}},
              {"capacitors", {{"C1_F", hcr.caps.C1}, {"C2_F", hcr.caps.C2}, {"C_m_F", hcr.C_m}}},
              {"gain",
               {{"formula", g.G},
                {"mna", res.gain},
                {"relative_discrepancy", mismatch},
                {"tolerance", c.gain_tolerance},
                {"within_tolerance", mismatch <= c.gain_tolerance}}},
              {"Q_hcr", g.Q},
              {"R_s_ohm", g.R_s},
              {"Z_prim_ohm", {{"formula", circuit::input_impedance(r.p, ch.R_Tx)}, {"mna", complex_json(res.z_prim)}}},
              {"loop_reactance_ohm", res.loop_reactance},
              {"rx_over_L2_voltage", res.rx_ratio}};
    if (r.model) {
        o["model"] = self_check(*r.model);
        if (ch.measured) {
            const auto& m = r.model->params;
            o["model"]["deviation_from_measured"] = {{"L1", m.L1 / r.p.L1 - 1.0},
                                                     {"L2", m.L2 / r.p.L2 - 1.0},
                                                     {"M", r.p.M != 0.0 ? m.M / r.p.M - 1.0 : 0.0}};
        }
    }
    return o;
}

json match_channel(const RunConfig& c, const ResolvedChannel& r, std::map<std::string, std::string>& files) {
    const auto& ch = *r.spec;
    const double Q = circuit::gain_formula(r.p, ch.R_Tx).Q;
    const auto ratios = matching::log_grid(c.matching.ratio_min, c.matching.ratio_max, c.matching.points);
    files[ch.name + "_matching.csv"] = matching::sweep_csv(matching::sweep(ratios, ch.L_Tx, Q, ch.f));
    const double cross = matching::find_tradeoff(ch.L_Tx, Q, ch.f);
    return {{"name", ch.name},
            {"L2_over_L_Tx", r.p.L2 / ch.L_Tx},
            {"verdict", matching::verdict(r.p.L2, ch.L_Tx)},
            {"v_rx", matching::divider_attenuation(r.p.L2, ch.L_Tx)},
            {"nspr", matching::nspr(r.p.L2, ch.L_Tx)},
            {"crossing_ratio", cross / ch.L_Tx},
            {"crossing_value", matching::divider_attenuation(cross, ch.L_Tx)},
            {"crossing_dB", matching::to_db(matching::divider_attenuation(cross, ch.L_Tx))}};
}

}  // namespace

namespace {

json decouple_system(const RunConfig& c, const std::vector<ResolvedChannel>& rs,
                     std::map<std::string, std::string>& files) {
    const int n = static_cast<int>(rs.size());
    if (n < 2) throw ConfigError("coupling: decoupling needs at least two channels");
    if (c.k_inter.size() == 0) throw ConfigError("coupling.k_inter: required for decoupling");
    std::vector<decoupling::ChannelConfig> chans;
    for (const auto& r : rs) chans.push_back(decoupling::make_channel(r.p, r.spec->L_Tx, r.spec->R_Tx));

    json predicted = json::array();
    for (int a = 0; a < n; ++a)
        for (int v = 0; v < n; ++v) {
            if (a == v || c.k_inter(a, v) == 0.0) continue;
            const auto cr = decoupling::coupled_current_ratio(chans[a], chans[v], c.k_inter(a, v));
            predicted.push_back({{"aggressor", rs[a].spec->name},
                                 {"victim", rs[v].spec->name},
                                 {"closed_form", cr.closed_form},
                                 {"step1", cr.step1},
                                 {"exact", cr.exact},
                                 {"warnings", cr.warnings}});
        }

    json o = {{"victim_primaries", termination_name(c.victims)}, {"predicted_ratio_without_scheme", predicted}};
    if (c.k_inter.cwiseAbs().maxCoeff() == 0.0) {
        o["scheme"] = decoupling::to_string(decoupling::Scheme::none);
        o["verdict"] = "no decoupling required";
        o["elements"] = json::array();
        return o;
    }
    const auto d = decoupling::design(chans, c.k_inter, c.scheme);
    const auto with = decoupling::build_coupled_system(chans, c.k_inter, d);
    const auto without =
        decoupling::build_coupled_system(chans, c.k_inter, decoupling::design(chans, c.k_inter, decoupling::Scheme::none));
    const bool capacitive =
        d.scheme == decoupling::Scheme::common_capacitor || d.scheme == decoupling::Scheme::per_channel_capacitors;
    json elems = json::array();
    for (const auto& e : d.elements) {
        json x = {{"channels", e.i < 0 ? json("all") : json::array({rs[e.i].spec->name, rs[e.j].spec->name})},
                  {"M_inter_H", e.M}};
        if (capacitive) {
            x["C_D_F"] = e.value;
            x["design_frequency_Hz"] = e.omega / (2.0 * kPi);
        } else {
            x["M_comp_H"] = e.value;
        }
        elems.push_back(x);
    }
    json sup = json::array();
    double worst = 1e300;
    for (const auto& s : decoupling::verify_suppression(with, without, c.victims)) {
        sup.push_back({{"aggressor", rs[s.aggressor].spec->name},
                       {"f_Hz", s.frequency},
                       {"ratio_with", s.ratio_with},
                       {"ratio_without", s.ratio_without},
                       {"improvement_dB", s.improvement_db},
                       {"absolute_dB", s.absolute_db}});
        worst = std::min(worst, s.improvement_db);
    }
    double fmin = 1e300, fmax = 0.0;
    for (const auto& ch : chans) fmin = std::min(fmin, ch.f_r), fmax = std::max(fmax, ch.f_r);
    std::vector<double> grid;
    const double lo = fmin * (1.0 - c.sweep_span), hi = fmax * (1.0 + c.sweep_span);
    const int pts = std::min(c.sweep_points, 401);
    for (int i = 0; i < pts; ++i) grid.push_back(lo + (hi - lo) * i / (pts - 1));
    for (int a = 0; a < n; ++a)
        files["victim_sweep_" + rs[a].spec->name + ".csv"] = decoupling::victim_sweep_csv(with, a, grid, c.victims);
    o["scheme"] = decoupling::to_string(d.scheme);
    o["elements"] = elems;
    if (capacitive) o["capacitor_current_A"] = d.capacitor_current;
    else o["compensating_coupling"] = d.comp_coupling;
    o["warnings"] = d.warnings;
    o["verified_suppression"] = sup;
    o["min_improvement_dB"] = worst;
    o["verdict"] = worst >= 30.0 ? "decoupled (>= 30 dB)" : "insufficient suppression (< 30 dB)";
    return o;
}

json thd_block(const RunConfig& c, std::map<std::string, std::string>& files) {
    const distortion::MagnetizationCurve curve{1.0, c.thd.sigma};
    json pts = json::array();
    const auto reports = distortion::thd_sweep(curve, c.thd.amplitudes, c.thd.n_harmonics);
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        std::vector<std::string> warn;
        const double ss = distortion::small_signal_thd(c.thd.sigma * r.amplitude, &warn);
        pts.push_back({{"amplitude_rel_Hsat", r.amplitude},
                       {"thd_f", r.thd_f},
                       {"thd_percent", r.thd_percent()},
                       {"small_signal_thd_f", ss},
                       {"warnings", warn}});
        files["spectrum_" + std::to_string(i + 1) + ".csv"] = distortion::spectrum_csv(r);
    }
    const double chain = distortion::chain_thd_budget(c.thd.amplifier_thd, c.thd.attenuation_db);
    return {{"sigma", c.thd.sigma},
            {"points", pts},
            {"chain_budget",
             {{"amplifier_thd_f", c.thd.amplifier_thd},
              {"filter_attenuation_dB", c.thd.attenuation_db},
              {"residual_thd_f", chain},
              {"residual_thd_percent", 100.0 * chain}}}};
}

}  // namespace

Output cmd_profile(double r_i, double r_o, int steps, double height) {
    if (!(r_i > 0.0)) throw ConfigError("--ri: inner radius must be positive");
    if (!(r_o > r_i)) throw ConfigError("--ro: outer radius must exceed inner radius (r_o > r_i)");
    if (steps < 2) throw ConfigError("--steps: must be >= 2");
    if (height < 0.0) throw ConfigError("--height: must be >= 0");
    const auto p = height > 0.0 ? geometry::dshape_profile_scaled(r_i, r_o, height, steps)
                                : geometry::dshape_profile(r_i, r_o, steps);
    Output out;
    out.doc = {{"provenance", {{"tool_version", kToolVersion}}},
               {"profile",
                {{"r_i_m", p.r_i},
                 {"r_o_m", p.r_o},
                 {"height_m", p.height()},
                 {"perimeter_m", p.perimeter},
                 {"area_m2", p.area},
                 {"rows", p.points.size()}}}};
    out.files["profile.csv"] = geometry::profile_csv(p);
    return out;
}

Output cmd_inductance(const RunConfig& c) {
    Output out;
    out.doc = header(c);
    json chans = json::array();
    for (const auto& ch : c.channels) {
        if (!ch.geometry) throw ConfigError("channels: " + ch.name + " has no geometry");
        const auto t = magnetics::build_transformer(ch.geometry->transformer_spec(ch.f));
        json o = self_check(t);
        o["name"] = ch.name;
        chans.push_back(o);
        json g = io::geometry_to_json(t.secondary);
        for (auto& f : io::geometry_to_json(t.primary)["filaments"]) g["filaments"].push_back(f);
        out.files[ch.name + "_geometry.json"] = io::dump(g);
    }
    out.doc["channels"] = chans;
    return out;
}

Output cmd_analyze(const RunConfig& c) {
    Output out;
    out.doc = header(c);
    json chans = json::array();
    for (const auto& r : resolve(c, true)) chans.push_back(analyze_channel(c, r, out.files));
    out.doc["channels"] = chans;
    return out;
}

Output cmd_match(const RunConfig& c) {
    Output out;
    out.doc = header(c);
    json chans = json::array();
    for (const auto& r : resolve(c, false)) chans.push_back(match_channel(c, r, out.files));
    out.doc["channels"] = chans;
    return out;
}

Output cmd_decouple(const RunConfig& c) {
    Output out;
    out.doc = header(c);
    out.doc["decoupling"] = decouple_system(c, resolve(c, false), out.files);
    return out;
}

Output cmd_thd(const RunConfig& c) {
    Output out;
    out.doc = header(c);
    out.doc["thd"] = thd_block(c, out.files);
    return out;
}

Output cmd_report(const RunConfig& c) {
    Output out;
    out.doc = header(c);
    const auto rs = resolve(c, true);
    json analysis = json::array(), match = json::array();
    for (const auto& r : rs) {
        analysis.push_back(analyze_channel(c, r, out.files));
        match.push_back(match_channel(c, r, out.files));
    }
    out.doc["channels"] = analysis;
    out.doc["matching"] = match;
    if (rs.size() >= 2 && c.k_inter.size() > 0) out.doc["decoupling"] = decouple_system(c, rs, out.files);
    out.doc["thd"] = thd_block(c, out.files);
    return out;
}

void write_output(const Output& out, const std::string& dir, const std::string& stem) {
    const std::filesystem::path d(dir);
    for (const auto& [name, content] : out.files) io::atomic_write(d / name, content);
    io::atomic_write(d / (stem + ".json"), io::dump(out.doc));
}

}  // namespace icn::pipeline
