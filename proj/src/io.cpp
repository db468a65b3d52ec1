#include "bclab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace bclab {

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_tagged(const std::string& path, json header, const Mat& payload)
{
    std::ofstream out(path);
    require(out.good(), ErrorCode::io, "cannot open for writing: " + path);
    header["rows"] = payload.rows();
    header["cols"] = payload.cols();
    out << header.dump() << '\n';
    for (Eigen::Index i = 0; i < payload.rows(); ++i) {
        for (Eigen::Index j = 0; j < payload.cols(); ++j) {
            if (j) out << ',';
            out << format_double(payload(i, j));
        }
        out << '\n';
    }
    require(out.good(), ErrorCode::io, "write failed: " + path);
}

std::pair<json, Mat> read_tagged(const std::string& path, const std::string& expected_tag)
{
    std::ifstream in(path);
    require(in.good(), ErrorCode::io, "cannot open: " + path);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorCode::format, "empty file: " + path);
    json header;
    try {
        header = json::parse(line);
    } catch (const json::exception& e) {
        fail(ErrorCode::format, path + ": bad header: " + e.what());
    }
    require(header.value("format", "") == expected_tag, ErrorCode::format,
            path + ": expected format " + expected_tag + ", found " + header.value("format", "<none>"));
    const auto rows = header.at("rows").get<Eigen::Index>();
    const auto cols = header.at("cols").get<Eigen::Index>();
    Mat payload(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        require(static_cast<bool>(std::getline(in, line)), ErrorCode::format, path + ": truncated payload");
        std::istringstream ss(line);
        std::string cell;
        for (Eigen::Index j = 0; j < cols; ++j) {
            require(static_cast<bool>(std::getline(ss, cell, ',')), ErrorCode::format, path + ": short row");
            try {
                payload(i, j) = std::stod(cell);
            } catch (const std::exception&) {
                fail(ErrorCode::format, path + ": bad number '" + cell + "'");
            }
        }
    }
    return {header, payload};
}

void write_csv(const std::string& path, const std::vector<std::string>& columns, const Mat& rows)
{
    std::ofstream out(path);
    require(out.good(), ErrorCode::io, "cannot open for writing: " + path);
    for (size_t j = 0; j < columns.size(); ++j) out << (j ? "," : "") << columns[j];
    out << '\n';
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        for (Eigen::Index j = 0; j < rows.cols(); ++j) out << (j ? "," : "") << format_double(rows(i, j));
        out << '\n';
    }
}

json to_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vec vec_from_json(const json& j)
{
    const auto s = j.get<std::vector<double>>();
    return Eigen::Map<const Vec>(s.data(), static_cast<Eigen::Index>(s.size()));
}

}  // namespace bclab
