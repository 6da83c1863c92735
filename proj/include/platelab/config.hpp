#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace platelab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat key=value configuration with dotted section keys. Unknown keys are
/// rejected at parse time. Lists use bracket syntax: key = [a, b, c].
class Config {
  public:
    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);

    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    long long get_long(const std::string& key, long long fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& fallback) const;
    std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;

    const std::string& text() const { return text_; }
    const std::map<std::string, std::string>& entries() const { return kv_; }

  private:
    std::map<std::string, std::string> kv_;
    std::string text_;
};

}  // namespace platelab
