#pragma once

#include <string>
#include <vector>

namespace aropt::poly {

enum class BlockKind { Control, State, Uncertainty, Auxiliary };

const char* block_kind_name(BlockKind kind);

struct VariableBlock {
  BlockKind kind = BlockKind::Control;
  std::string name;
  int dim = 0;
  int offset = 0;  // first global index

  int index(int local) const { return offset + local; }
  bool contains(int global) const { return global >= offset && global < offset + dim; }
};

// Ordered collection of variable blocks; global variable indices are assigned
// contiguously in insertion order.
class VariableSpace {
 public:
  // Returns a copy; references into the space are invalidated by later additions.
  VariableBlock add_block(BlockKind kind, std::string name, int dim);

  int size() const { return size_; }
  int block_count() const { return static_cast<int>(blocks_.size()); }
  const VariableBlock& block(int id) const { return blocks_.at(id); }
  const VariableBlock& block(const std::string& name) const;
  const VariableBlock* find(const std::string& name) const;
  const VariableBlock& block_of(int global) const;

  // "y3" style name, 1-based within the block.
  std::string variable_name(int global) const;
  // Inverse of variable_name; returns -1 when the name is unknown.
  int parse_variable(const std::string& text) const;

 private:
  std::vector<VariableBlock> blocks_;
  int size_ = 0;
};

}  // namespace aropt::poly
