#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace gauntlet::util {

using json = nlohmann::json;

// Parses text as JSON; throws ParseError with context on failure.
json parse_json(const std::string& text, const std::string& where);

// Reads a whole file; throws Error if unreadable.
std::string read_file(const std::string& path);

// Writes content atomically enough for our purposes (tmp + rename).
void write_file(const std::string& path, const std::string& content);

// Required-key accessors that throw SchemaError naming the field.
std::string require_string(const json& j, const std::string& key, const std::string& ctx);
double require_number(const json& j, const std::string& key, const std::string& ctx);
const json& require_key(const json& j, const std::string& key, const std::string& ctx);

std::string to_lower(std::string s);
bool starts_with(const std::string& s, const std::string& prefix);
bool contains_ci(const std::string& haystack, const std::string& needle);

// Random 128-bit hex id in UUID-v4 layout.
std::string make_uuid();

// FNV-1a 64-bit, used by the deterministic mock judge.
std::uint64_t fnv1a(const std::string& data, std::uint64_t seed = 14695981039346656037ull);

// "http://host:port/path" -> filename-safe slug ("host_port_path").
std::string slugify(const std::string& s);

std::string join(const std::vector<std::string>& parts, const std::string& sep);

// ISO-8601 UTC timestamp, second resolution.
std::string now_iso8601();

}  // namespace gauntlet::util
