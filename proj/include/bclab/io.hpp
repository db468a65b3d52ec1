#pragma once

#include <string>

#include "bclab/common.hpp"
#include "json.hpp"

namespace bclab {

using json = nlohmann::json;

// File layout shared by every artifact: one JSON header line carrying a
// "format" tag, then a CSV matrix payload printed with 17 significant digits.
void write_tagged(const std::string& path, json header, const Mat& payload);
std::pair<json, Mat> read_tagged(const std::string& path, const std::string& expected_tag);

void write_csv(const std::string& path, const std::vector<std::string>& columns, const Mat& rows);
std::string format_double(double v);

json to_json(const Vec& v);
Vec vec_from_json(const json& j);

}  // namespace bclab
