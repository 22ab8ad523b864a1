#pragma once

#include "twinlattice/lattice.hpp"
#include "twinlattice/table_io.hpp"

#include <iosfwd>
#include <string>

namespace twinlat {

// Snapshot format: "# key = value" header (n, a, lambda, geometry, clamp maps), then the
// column header "i,ux,uy,theta" and one record per column from column_first to column_last.
// All reals are written with 17 significant digits, so a round trip is bit-exact.
void write_chain(std::ostream& os, const ChainState& chain, const Header& extra = {});
ChainState read_chain(std::istream& is);

void save_chain(const std::string& path, const ChainState& chain, const Header& extra = {});
ChainState load_chain(const std::string& path);

Header chain_header(const ChainState& chain);

}  // namespace twinlat
