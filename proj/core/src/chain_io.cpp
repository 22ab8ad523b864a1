#include "twinlattice/chain_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace twinlat {

namespace {

std::string matrix_text(const Mat2& m) {
    return fmt17(m(0, 0)) + " " + fmt17(m(0, 1)) + " " + fmt17(m(1, 0)) + " " + fmt17(m(1, 1));
}

std::string vector_text(const Vec2& v) { return fmt17(v.x()) + " " + fmt17(v.y()); }

std::vector<double> numbers(const std::string& text, std::size_t expected) {
    std::istringstream in(text);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(parse_double(tok));
    if (out.size() != expected) throw std::invalid_argument("snapshot: malformed entry '" + text + "'");
    return out;
}

const std::string& require(const Header& h, const std::string& key) {
    const std::string* v = find_entry(h, key);
    if (!v) throw std::invalid_argument("snapshot: missing header entry '" + key + "'");
    return *v;
}

BoundaryKind kind_from(const std::string& s) {
    if (s == "affine") return BoundaryKind::affine;
    if (s == "twin") return BoundaryKind::twin;
    if (s == "custom") return BoundaryKind::custom;
    throw std::invalid_argument("snapshot: unknown boundary kind '" + s + "'");
}

}  // namespace

Header chain_header(const ChainState& chain) {
    const LatticeGeometry& g = chain.geometry();
    const BoundaryData& bc = chain.boundary();
    return {
        {"format", "twinlattice-chain-1"},
        {"n", std::to_string(g.n)},
        {"a", fmt17(chain.wells().a)},
        {"lambda", fmt17(bc.lambda)},
        {"bc", to_string(bc.kind)},
        {"column_first", std::to_string(g.column_first)},
        {"column_last", std::to_string(g.column_last)},
        {"row_first", std::to_string(g.row_first)},
        {"row_last", std::to_string(g.row_last)},
        {"spacing", fmt17(g.spacing)},
        {"rescaled", g.rescaled ? "1" : "0"},
        {"left_gradient", matrix_text(bc.left.gradient)},
        {"left_offset", vector_text(bc.left.offset)},
        {"right_gradient", matrix_text(bc.right.gradient)},
        {"right_offset", vector_text(bc.right.offset)},
    };
}

void write_chain(std::ostream& os, const ChainState& chain, const Header& extra) {
    write_header(os, extra);
    write_header(os, chain_header(chain));
    os << "i,ux,uy,theta\n";
    const LatticeGeometry& g = chain.geometry();
    for (int i = g.column_first; i <= g.column_last; ++i) {
        const Vec2& u = chain.u(i);
        os << i << ',' << fmt17(u.x()) << ',' << fmt17(u.y()) << ',' << fmt17(chain.theta(i)) << '\n';
    }
}

ChainState read_chain(std::istream& is) {
    const Header h = read_header(is);
    if (require(h, "format") != "twinlattice-chain-1") {
        throw std::invalid_argument("snapshot: unsupported format");
    }
    LatticeGeometry g;
    g.n = parse_int(require(h, "n"));
    g.column_first = parse_int(require(h, "column_first"));
    g.column_last = parse_int(require(h, "column_last"));
    g.row_first = parse_int(require(h, "row_first"));
    g.row_last = parse_int(require(h, "row_last"));
    g.spacing = parse_double(require(h, "spacing"));
    g.rescaled = require(h, "rescaled") == "1";

    const WellPair wells = build_wells(parse_double(require(h, "a")));
    BoundaryData bc;
    bc.kind = kind_from(require(h, "bc"));
    bc.lambda = parse_double(require(h, "lambda"));
    auto fill = [&](ClampMap& m, const std::string& side) {
        const auto G = numbers(require(h, side + "_gradient"), 4);
        const auto c = numbers(require(h, side + "_offset"), 2);
        m.gradient << G[0], G[1], G[2], G[3];
        m.offset = Vec2(c[0], c[1]);
    };
    fill(bc.left, "left");
    fill(bc.right, "right");

    ChainState chain(g, wells, bc);
    std::string line;
    std::getline(is, line);
    if (line != "i,ux,uy,theta") throw std::invalid_argument("snapshot: missing record header");
    int expected = g.column_first;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 4) throw std::invalid_argument("snapshot: malformed record '" + line + "'");
        const int i = parse_int(f[0]);
        if (i != expected) throw std::invalid_argument("snapshot: records out of order");
        const Vec2 u(parse_double(f[1]), parse_double(f[2]));
        const double t = parse_double(f[3]);
        if (chain.is_free(i)) {
            chain.set_u(i, u);
            chain.set_theta(i, t);
        } else if (u != chain.u(i) || t != chain.theta(i)) {
            throw std::invalid_argument("snapshot: clamped record disagrees with boundary data");
        }
        ++expected;
    }
    if (expected != g.column_last + 1) throw std::invalid_argument("snapshot: truncated records");
    return chain;
}

void save_chain(const std::string& path, const ChainState& chain, const Header& extra) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    write_chain(os, chain, extra);
}

ChainState load_chain(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    return read_chain(is);
}

}  // namespace twinlat
