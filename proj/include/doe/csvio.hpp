#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "doe/errors.hpp"

namespace doe::csv {

// Formats a double with enough digits to round-trip exactly. Used for every
// numeric CSV field so repeated runs produce byte-identical files.
std::string fmt(double v);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const; // -1 if absent
    int require_column(const std::string& name) const; // throws InputError
};

// Reads a comma-separated file with a mandatory header row. Blank lines are
// skipped; every data row must have the same field count as the header.
Table read_file(const std::string& path);

double to_double(const std::string& s, const std::string& context);
long to_long(const std::string& s, const std::string& context);

std::ofstream open_out(const std::string& path);

} // namespace doe::csv
