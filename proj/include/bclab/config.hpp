#pragma once

#include <map>

#include "bclab/io.hpp"
#include "bclab/stability.hpp"

namespace bclab {

struct ConfigKey {
    std::string key;
    std::string value;  // default
    std::string help;
};

const std::vector<ConfigKey>& config_schema();

// key = value lines, '#' comments. Keys outside the schema are rejected except `param.<name>`,
// which feeds preset parameters.
class Config {
public:
    Config();
    void load_file(const std::string& path);
    void set(const std::string& key, const std::string& value);
    void set_assignment(const std::string& line);  // "key=value"

    const std::string& str(const std::string& key) const;
    double num(const std::string& key) const;
    int integer(const std::string& key) const;
    bool flag(const std::string& key) const;
    std::vector<double> nums(const std::string& key) const;
    std::vector<int> ints(const std::string& key) const;
    Params preset_params() const;

    // Tolerances positive, lists nonempty; throws ErrorCode::config.
    void validate() const;
    json to_json() const;

private:
    std::map<std::string, std::string> values_;
};

std::string defaults_text();

ReconstructionOptions reconstruction_options(const Config& c);
ExperimentConfig experiment_config(const Config& c);
DistanceOptions distance_options(const Config& c);

}  // namespace bclab
