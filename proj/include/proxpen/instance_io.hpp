#pragma once

#include "proxpen/instances.hpp"

#include <iosfwd>
#include <string>
#include <variant>

namespace proxpen {

using InstanceData = std::variant<SimplexQpInstance, LinConstrQpInstance>;

// Instance file layout:
//   bytes 0..7   magic "PROXPEN1"
//   bytes 8..15  header length H, uint64 little-endian
//   next H bytes UTF-8 JSON header (kind, dims, seed, xi, tau, m, M and the
//                ordered list of sections with their shapes)
//   sections     float64 little-endian, row-major, in header order:
//                A, B, D (diagonal), b [, A_eq, b_eq, z_feas]
void write_instance(std::ostream& out, const InstanceData& inst);
InstanceData read_instance(std::istream& in);

void save_instance(const std::string& path, const InstanceData& inst);
InstanceData load_instance(const std::string& path);

const SimplexQpInstance& objective_of(const InstanceData& inst);
std::string instance_id(const InstanceData& inst);

} // namespace proxpen
