#include "aropt/poly/variables.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "aropt/error.hpp"

namespace aropt::poly {

const char* block_kind_name(BlockKind kind) {
  switch (kind) {
    case BlockKind::Control: return "control";
    case BlockKind::State: return "state";
    case BlockKind::Uncertainty: return "uncertainty";
    case BlockKind::Auxiliary: return "auxiliary";
  }
  return "unknown";
}

VariableBlock VariableSpace::add_block(BlockKind kind, std::string name, int dim) {
  if (dim <= 0) throw DimensionError("variable block '" + name + "' must have positive dimension");
  if (name.empty() || !std::all_of(name.begin(), name.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); }))
    throw std::invalid_argument("variable block name must be alphabetic: '" + name + "'");
  if (find(name)) throw std::invalid_argument("duplicate variable block '" + name + "'");
  blocks_.push_back({kind, std::move(name), dim, size_});
  size_ += dim;
  return blocks_.back();
}

const VariableBlock* VariableSpace::find(const std::string& name) const {
  for (const auto& b : blocks_)
    if (b.name == name) return &b;
  return nullptr;
}

const VariableBlock& VariableSpace::block(const std::string& name) const {
  const VariableBlock* b = find(name);
  if (!b) throw std::out_of_range("no variable block '" + name + "'");
  return *b;
}

const VariableBlock& VariableSpace::block_of(int global) const {
  for (const auto& b : blocks_)
    if (b.contains(global)) return b;
  throw std::out_of_range("variable index " + std::to_string(global) + " outside the space");
}

std::string VariableSpace::variable_name(int global) const {
  auto b = std::find_if(blocks_.begin(), blocks_.end(), [&](const VariableBlock& v) { return v.contains(global); });
  if (b == blocks_.end()) return "v" + std::to_string(global + 1);
  return b->name + std::to_string(global - b->offset + 1);
}

int VariableSpace::parse_variable(const std::string& text) const {
  std::size_t split = 0;
  while (split < text.size() && std::isalpha(static_cast<unsigned char>(text[split]))) ++split;
  if (split == 0 || split == text.size()) return -1;
  int local = 0;
  auto [ptr, ec] = std::from_chars(text.data() + split, text.data() + text.size(), local);
  if (ec != std::errc() || ptr != text.data() + text.size()) return -1;
  const VariableBlock* b = find(text.substr(0, split));
  if (b == nullptr || local < 1 || local > b->dim) return -1;
  return b->offset + local - 1;
}

}  // namespace aropt::poly
