#include "rdpredict/io.hpp"

#include "rdpredict/errors.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace rdpredict {

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

void emit_string(std::ostringstream& os, const std::string& s) {
    os << nlohmann::json(s).dump();
}

void emit(std::ostringstream& os, const nlohmann::json& v, int indent, int depth) {
    const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    const char* sep = indent > 0 ? ": " : ":";
    switch (v.type()) {
        case nlohmann::json::value_t::object: {
            if (v.empty()) {
                os << "{}";
                return;
            }
            os << '{';
            bool first = true;
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!first) os << ',';
                first = false;
                os << pad;
                emit_string(os, it.key());
                os << sep;
                emit(os, it.value(), indent, depth + 1);
            }
            os << close << '}';
            return;
        }
        case nlohmann::json::value_t::array: {
            if (v.empty()) {
                os << "[]";
                return;
            }
            os << '[';
            bool first = true;
            for (const auto& e : v) {
                if (!first) os << ',';
                first = false;
                os << pad;
                emit(os, e, indent, depth + 1);
            }
            os << close << ']';
            return;
        }
        case nlohmann::json::value_t::number_float: {
            const double x = v.get<double>();
            // JSON has no NaN or infinity.
            if (std::isfinite(x)) os << format_double(x); else os << "null";
            return;
        }
        default: os << v.dump(); return;
    }
}

}  // namespace

std::string dump_json(const nlohmann::json& value, int indent) {
    std::ostringstream os;
    emit(os, value, indent, 0);
    return os.str();
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << dump_json(value) << '\n';
    if (!out) throw Error("write failed: " + path.string());
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path), columns_(header.size()), path_(path) {
    if (!out_) throw Error("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out_ << ',';
        out_ << header[i];
    }
    out_ << '\n';
}

void CsvWriter::row(std::span<const double> values) { row({values}); }

void CsvWriter::row(std::initializer_list<std::span<const double>> parts) {
    std::size_t n = 0;
    for (auto part : parts) {
        for (double x : part) {
            if (n++) out_ << ',';
            out_ << format_double(x);
        }
    }
    if (n != columns_) {
        throw DimensionError(path_.string() + ": row has " + std::to_string(n) + " values, header has " +
                             std::to_string(columns_));
    }
    out_ << '\n';
}

void CsvWriter::close() {
    out_.close();
    if (out_.fail()) throw Error("write failed: " + path_.string());
}

}  // namespace rdpredict
