#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace platelab {

/// CSV artifact writer: mandatory header row, "," delimiter, all floats
/// serialized as "%.17g" so reruns are byte-comparable.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& cells);

    static std::string fmt(double v);
    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::ofstream out_;
    size_t columns_;
};

struct RunManifest {
    std::string command;
    std::string config_text;
    std::string version;
    unsigned long long seed = 0;
    int elements = 0;
    std::vector<int> modes;
    double wall_seconds = 0.0;
    std::vector<std::string> outputs;
};

void write_manifest(const RunManifest& m, const std::string& path);

std::string platelab_version();

}  // namespace platelab
