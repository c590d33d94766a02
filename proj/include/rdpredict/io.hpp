#pragma once

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace rdpredict {

/// %.17g, so values survive a text round trip bit for bit.
std::string format_double(double x);

/// JSON text with every floating-point number printed via format_double.
std::string dump_json(const nlohmann::json& value, int indent = 2);
void write_json(const std::filesystem::path& path, const nlohmann::json& value);

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    void row(std::span<const double> values);
    void row(std::initializer_list<std::span<const double>> parts);
    void close();

private:
    std::ofstream out_;
    std::size_t columns_;
    std::filesystem::path path_;
};

}  // namespace rdpredict
