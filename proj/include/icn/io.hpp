// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "icn/circuit.hpp"
#include "icn/magnetics.hpp"

namespace icn::io {

using json = nlohmann::ordered_json;

// Object reader that rejects unknown keys and reports the dotted path of the offending field.
class StrictObject {
  public:
    StrictObject(const json& j, std::string path);
    ~StrictObject() = default;

    bool has(const std::string& key) const;
    double number(const std::string& key) const;
    double number(const std::string& key, double fallback) const;
    int integer(const std::string& key) const;
    int integer(const std::string& key, int fallback) const;
    bool boolean(const std::string& key, bool fallback) const;
    std::string string(const std::string& key) const;
    std::string string(const std::string& key, const std::string& fallback) const;
    std::vector<double> numbers(const std::string& key) const;
    const json& raw(const std::string& key) const;
    StrictObject object(const std::string& key) const;
    std::string path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    // Throws ConfigError naming every key that was never read.
    void finish() const;

  private:
    const json& j_;
    std::string path_;
    mutable std::set<std::string> used_;
    const json& get(const std::string& key) const;
};

json parse(const std::string& text);
json read_json(const std::filesystem::path& p);

// Numbers rounded to 9 significant digits, two-space indent, trailing newline.
std::string dump(const json& j);

// Writes through a temporary sibling file and renames it into place.
void atomic_write(const std::filesystem::path& p, const std::string& content);

std::string sha256_hex(const std::string& data);

json geometry_to_json(const magnetics::WindingGeometry& g);
magnetics::WindingGeometry geometry_from_json(const json& j);

json netlist_to_json(const circuit::Netlist& n);
circuit::Netlist netlist_from_json(const json& j);

json two_port_to_json(const magnetics::TwoPortParams& p);

}  // namespace icn::io
