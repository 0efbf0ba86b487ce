#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace mvep::csv {

// Shortest text that round-trips: 17 significant digits, '.' decimal point.
std::string number(double x);
inline std::string number(std::size_t x) { return std::to_string(x); }
inline std::string number(int x) { return std::to_string(x); }

class Writer {
public:
    Writer(const std::filesystem::path& path, std::initializer_list<std::string> header);

    void row(const std::vector<std::string>& cells);

private:
    std::ofstream out_;
    std::size_t columns_;
};

}  // namespace mvep::csv
