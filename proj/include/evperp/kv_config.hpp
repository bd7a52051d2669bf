#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evperp {

struct KvEntry {
  std::string key;
  std::string value;
  int line = 0;
};

// One `[name]` block and the `key = value` lines under it.
class KvBlock {
public:
  KvBlock(std::string name, int line, std::string source)
      : name_(std::move(name)), line_(line), source_(std::move(source)) {}

  const std::string& name() const noexcept { return name_; }
  int line() const noexcept { return line_; }
  const std::vector<KvEntry>& entries() const noexcept { return entries_; }
  void add(KvEntry e);

  bool has(std::string_view key) const;
  const KvEntry* find(std::string_view key) const;

  std::string get_string(std::string_view key, std::string fallback) const;
  std::string require_string(std::string_view key) const;
  double get_double(std::string_view key, double fallback) const;
  std::optional<double> get_optional_double(std::string_view key) const;
  int get_int(std::string_view key, int fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;
  std::vector<double> get_doubles(std::string_view key, std::vector<double> fallback) const;

  /// Throws ParseError naming the first key not in `allowed`.
  void reject_unknown(std::initializer_list<std::string_view> allowed) const;

  /// ParseError carrying "<source>:<line>: " context.
  [[noreturn]] void fail(int line, const std::string& message) const;

private:
  std::string name_;
  int line_ = 0;
  std::string source_;
  std::vector<KvEntry> entries_;
};

struct KvDocument {
  std::string source;
  std::vector<KvBlock> blocks;

  std::vector<const KvBlock*> all(std::string_view name) const;
  /// At most one block named `name`; duplicates are a ParseError.
  const KvBlock* single(std::string_view name) const;
};

/// `#` starts a comment; blank lines are ignored; every key must sit inside a block.
KvDocument parse_kv(std::string_view text, std::string source = "<input>");

std::string read_text_file(const std::string& path);

}  // namespace evperp
