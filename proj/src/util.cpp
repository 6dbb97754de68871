#include "gauntlet/util.hpp"

#include "gauntlet/errors.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>

namespace gauntlet::util {

json parse_json(const std::string& text, const std::string& where) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("malformed JSON in " + where + ": " + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write file: " + path);
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

const json& require_key(const json& j, const std::string& key, const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end()) throw SchemaError(key, "missing required field in " + ctx);
    return *it;
}

std::string require_string(const json& j, const std::string& key, const std::string& ctx) {
    const json& v = require_key(j, key, ctx);
    if (!v.is_string()) throw SchemaError(key, "expected string in " + ctx);
    return v.get<std::string>();
}

double require_number(const json& j, const std::string& key, const std::string& ctx) {
    const json& v = require_key(j, key, ctx);
    if (!v.is_number()) throw SchemaError(key, "expected number in " + ctx);
    return v.get<double>();
}

std::string to_lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool starts_with(const std::string& s, const std::string& prefix) {
    return s.rfind(prefix, 0) == 0;
}

bool contains_ci(const std::string& haystack, const std::string& needle) {
    return to_lower(haystack).find(to_lower(needle)) != std::string::npos;
}

std::string make_uuid() {
    static std::mutex mu;
    static std::mt19937_64 rng(std::random_device{}());
    std::uint64_t hi, lo;
    {
        std::lock_guard<std::mutex> lock(mu);
        hi = rng();
        lo = rng();
    }
    // v4 layout: xxxxxxxx-xxxx-4xxx-yxxx-xxxxxxxxxxxx
    hi = (hi & 0xffffffffffff0fffull) | 0x0000000000004000ull;
    lo = (lo & 0x3fffffffffffffffull) | 0x8000000000000000ull;
    char buf[37];
    std::snprintf(buf, sizeof(buf), "%08x-%04x-%04x-%04x-%012llx",
                  static_cast<unsigned>(hi >> 32), static_cast<unsigned>((hi >> 16) & 0xffff),
                  static_cast<unsigned>(hi & 0xffff), static_cast<unsigned>(lo >> 48),
                  static_cast<unsigned long long>(lo & 0xffffffffffffull));
    return std::string(buf);
}

std::uint64_t fnv1a(const std::string& data, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string slugify(const std::string& s) {
    std::string out;
    bool last_sep = true;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.') {
            out.push_back(c);
            last_sep = false;
        } else if (!last_sep) {
            out.push_back('_');
            last_sep = true;
        }
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out.empty() ? "unnamed" : out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string now_iso8601() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return std::string(buf);
}

}  // namespace gauntlet::util
