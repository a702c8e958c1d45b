#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace coopq {

inline constexpr const char* kCodeVersion = "0.1.0";

// Rectangular numeric table; rows are written at 12 significant digits with
// LF line endings, so identical inputs yield byte-identical files.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

std::string format_value(double v);  // %.12g
std::string render_csv(const Table& t);

// FNV-1a 64-bit digest of a byte string, hex-encoded.
std::string fnv1a64_hex(const std::string& bytes);

// Writes the CSV and returns its digest.  Throws ValidationError on ragged
// rows and Error on unwritable paths.
std::string write_csv(const Table& t, const std::string& path);

// Per-run manifest: command, parameters, master seed, code version,
// timestamps and the digest of every file the run emitted.
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> params;
    std::uint64_t master_seed = 0;
    std::string started;
    std::string finished;
    std::vector<std::pair<std::string, std::string>> outputs;  // (path, digest)

    void write(const std::string& path) const;
};

std::string iso8601_utc_now();

}  // namespace coopq
