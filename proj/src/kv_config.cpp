#include "evperp/kv_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "evperp/core_types.hpp"

namespace evperp {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

void KvBlock::add(KvEntry e) {
  if (has(e.key)) fail(e.line, "duplicate key '" + e.key + "' in [" + name_ + "]");
  entries_.push_back(std::move(e));
}

const KvEntry* KvBlock::find(std::string_view key) const {
  for (const auto& e : entries_) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

bool KvBlock::has(std::string_view key) const { return find(key) != nullptr; }

void KvBlock::fail(int line, const std::string& message) const {
  throw Error(ErrorCode::ParseError, source_ + ":" + std::to_string(line) + ": " + message);
}

std::string KvBlock::get_string(std::string_view key, std::string fallback) const {
  const KvEntry* e = find(key);
  return e ? e->value : fallback;
}

std::string KvBlock::require_string(std::string_view key) const {
  const KvEntry* e = find(key);
  if (!e) fail(line_, "[" + name_ + "] requires '" + std::string(key) + "'");
  return e->value;
}

double KvBlock::get_double(std::string_view key, double fallback) const {
  return get_optional_double(key).value_or(fallback);
}

std::optional<double> KvBlock::get_optional_double(std::string_view key) const {
  const KvEntry* e = find(key);
  if (!e) return std::nullopt;
  const auto v = to_double(e->value);
  if (!v) fail(e->line, "'" + e->key + "' expects a number, got '" + e->value + "'");
  return v;
}

int KvBlock::get_int(std::string_view key, int fallback) const {
  const KvEntry* e = find(key);
  if (!e) return fallback;
  int v = 0;
  const auto s = trim(e->value);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(e->line, "'" + e->key + "' expects an integer, got '" + e->value + "'");
  }
  return v;
}

bool KvBlock::get_bool(std::string_view key, bool fallback) const {
  const KvEntry* e = find(key);
  if (!e) return fallback;
  if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
  if (e->value == "false" || e->value == "0" || e->value == "no") return false;
  fail(e->line, "'" + e->key + "' expects true/false, got '" + e->value + "'");
}

std::vector<double> KvBlock::get_doubles(std::string_view key, std::vector<double> fallback) const {
  const KvEntry* e = find(key);
  if (!e) return fallback;
  std::vector<double> out;
  std::string_view rest = e->value;
  while (true) {
    const auto comma = rest.find(',');
    const auto v = to_double(rest.substr(0, comma));
    if (!v) fail(e->line, "'" + e->key + "' expects a comma-separated list of numbers");
    out.push_back(*v);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

void KvBlock::reject_unknown(std::initializer_list<std::string_view> allowed) const {
  for (const auto& e : entries_) {
    if (std::find(allowed.begin(), allowed.end(), e.key) == allowed.end()) {
      fail(e.line, "unknown key '" + e.key + "' in [" + name_ + "]");
    }
  }
}

std::vector<const KvBlock*> KvDocument::all(std::string_view name) const {
  std::vector<const KvBlock*> out;
  for (const auto& b : blocks) {
    if (b.name() == name) out.push_back(&b);
  }
  return out;
}

const KvBlock* KvDocument::single(std::string_view name) const {
  const auto found = all(name);
  if (found.size() > 1) {
    found[1]->fail(found[1]->line(), "block [" + std::string(name) + "] may appear only once");
  }
  return found.empty() ? nullptr : found.front();
}

KvDocument parse_kv(std::string_view text, std::string source) {
  KvDocument doc;
  doc.source = source;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto where = [&] { return source + ":" + std::to_string(line) + ": "; };
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3) {
        throw Error(ErrorCode::ParseError, where() + "malformed block header '" + std::string(s) + "'");
      }
      doc.blocks.emplace_back(std::string(trim(s.substr(1, s.size() - 2))), line, source);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ParseError, where() + "expected 'key = value', got '" + std::string(s) + "'");
    }
    if (doc.blocks.empty()) {
      throw Error(ErrorCode::ParseError, where() + "key outside of any [block]");
    }
    const auto key = trim(s.substr(0, eq));
    if (key.empty()) throw Error(ErrorCode::ParseError, where() + "empty key");
    doc.blocks.back().add(KvEntry{std::string(key), std::string(trim(s.substr(eq + 1))), line});
  }
  return doc;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace evperp
