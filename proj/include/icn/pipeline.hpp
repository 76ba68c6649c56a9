// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "icn/decoupling.hpp"
#include "icn/io.hpp"
#include "icn/magnetics.hpp"

namespace icn::pipeline {

inline constexpr const char* kToolVersion = "0.1.0";

struct GeometryEnvelope {
    double r_i = 0.04, r_o = 0.092, height = 0.086;  // meters; height 0 keeps the natural D-shape
    double wire_diameter = 2.6e-3;
    double primary_wire_diameter = 1.6e-3;
    double primary_gap = 15e-3;
    double lead_length = 6e-3;
    int segments = 4, turns_per_segment = 36, layers = 3, primary_turns = 12;
    int segments_per_turn = 64;
    bool return_wire = true;
    double R1 = 0.2, R2 = 0.012;  // ohms, attached to the model two-port

    magnetics::ToroidalTransformerSpec transformer_spec(double f) const;
};

struct ChannelSpec {
    std::string name;
    double f = 0.0;  // hertz
    double L_Tx = 0.0, R_Tx = 0.0;
    std::optional<magnetics::TwoPortParams> measured;  // drives the circuit analysis when present
    std::optional<GeometryEnvelope> geometry;          // filament model; used when no measured values
};

struct MatchingRange {
    double ratio_min = 0.1, ratio_max = 10.0;
    int points = 201;
};

struct ThdConfig {
    double sigma = 1.75;
    std::vector<double> amplitudes{0.01, 0.14};
    int n_harmonics = 15;
    double amplifier_thd = 0.005;
    std::vector<double> attenuation_db{65.0, 100.0, 150.0};
};

struct RunConfig {
    std::vector<ChannelSpec> channels;
    Eigen::MatrixXd k_inter;  // empty when unspecified
    decoupling::Scheme scheme = decoupling::Scheme::common_capacitor;
    decoupling::PrimaryTermination victims = decoupling::PrimaryTermination::open;
    MatchingRange matching;
    int sweep_points = 2001;
    double sweep_span = 0.1;
    ThdConfig thd;
    std::string output_dir = "out";
    double gain_tolerance = 0.005;  // formula vs MNA, relative

    io::json to_json() const;  // resolved form, embedded in every output
};

RunConfig parse_config(const io::json& j);

// Result document plus data files (relative name -> content), all deterministic.
struct Output {
    io::json doc;
    std::map<std::string, std::string> files;
};

Output cmd_profile(double r_i, double r_o, int steps, double height = 0.0);
Output cmd_inductance(const RunConfig& c);
Output cmd_analyze(const RunConfig& c);
Output cmd_match(const RunConfig& c);
Output cmd_decouple(const RunConfig& c);
Output cmd_thd(const RunConfig& c);
Output cmd_report(const RunConfig& c);

// Writes doc (as <stem>.json) and files under dir, each atomically.
void write_output(const Output& out, const std::string& dir, const std::string& stem);

}  // namespace icn::pipeline
