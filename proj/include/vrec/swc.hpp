#pragma once

#include <string>

#include "vrec/tree.hpp"

namespace vrec {

/// Serialize a tree as SWC: one "id type x y z radius parent" line per node,
/// type code 7, '#' comment lines allowed. 2D trees write z = 0 and a
/// "# dim 2" marker so read(write(t)) == t. Numbers use round-trip precision.
/// `header_comment`, if nonempty, is emitted as leading # lines.
std::string swc_write(const VesselTree& tree, const std::string& header_comment = "");

/// Parse SWC text. Malformed lines, forward parent references and duplicate
/// ids raise ParseError with the offending line number. Without a "# dim"
/// marker the tree is 3D unless every z is 0.
VesselTree swc_read(const std::string& text);

VesselTree swc_load(const std::string& path);
void swc_save(const VesselTree& tree, const std::string& path, const std::string& header_comment = "");

}  // namespace vrec
