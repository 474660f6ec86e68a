#pragma once

#include <ostream>
#include <string>

#include "aropt/conic/program.hpp"

namespace aropt::conic {

// Writes the dual of the program in SDPA sparse format: the program rows become
// SDPA variables y, free variables become pairs of diagonal entries and second
// order cones become arrow matrices. The SDPA objective is -b'y, so its
// optimum equals offset minus the program optimum.
void write_sdpa(const ConicProgram& program, std::ostream& out);
void write_sdpa(const ConicProgram& program, const std::string& path);

}  // namespace aropt::conic
