#include "platelab/runio.hpp"

#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace platelab {

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path), out_(path), columns_(header.size()) {
    if (!out_) throw std::runtime_error("cannot open output file: " + path);
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) out_ << ',';
        out_ << header[i];
    }
    out_ << '\n';
}

std::string CsvWriter::fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_) throw std::runtime_error("csv row width mismatch");
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) out_ << ',';
        out_ << fmt(values[i]);
    }
    out_ << '\n';
}

void CsvWriter::row_mixed(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::runtime_error("csv row width mismatch");
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
}

std::string platelab_version() { return "platelab 0.1.0"; }

void write_manifest(const RunManifest& m, const std::string& path) {
    nlohmann::json j;
    j["command"] = m.command;
    j["version"] = m.version;
    j["seed"] = m.seed;
    j["elements"] = m.elements;
    j["modes"] = m.modes;
    j["wall_seconds"] = m.wall_seconds;
    j["outputs"] = m.outputs;
    j["config"] = m.config_text;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open manifest file: " + path);
    out << j.dump(2) << '\n';
}

}  // namespace platelab
