#include "coopq/table.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include <nlohmann/json.hpp>

#include "coopq/types.hpp"

namespace coopq {

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string render_csv(const Table& t) {
    std::string out;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
        if (c) out += ',';
        out += t.header[c];
    }
    out += '\n';
    for (const auto& row : t.rows) {
        if (row.size() != t.header.size())
            throw ValidationError("table row width does not match header");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_value(row[c]);
        }
        out += '\n';
    }
    return out;
}

std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string write_csv(const Table& t, const std::string& path) {
    const std::string body = render_csv(t);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open for writing: " + path);
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) throw Error("write failed: " + path);
    return fnv1a64_hex(body);
}

std::string iso8601_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void RunManifest::write(const std::string& path) const {
    nlohmann::json j;
    j["command"] = command;
    j["params"] = params;
    j["master_seed"] = master_seed;
    j["code_version"] = kCodeVersion;
    j["started"] = started;
    j["finished"] = finished;
    auto& outs = j["outputs"] = nlohmann::json::array();
    for (const auto& [p, digest] : outputs) outs.push_back({{"path", p}, {"fnv1a64", digest}});
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open for writing: " + path);
    f << j.dump(2) << "\n";
}

}  // namespace coopq
