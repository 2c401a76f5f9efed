#include "vrec/swc.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace vrec {

namespace {

// Shortest decimal form that parses back to the same double.
std::string fmt_double(double v) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

}  // namespace

std::string swc_write(const VesselTree& tree, const std::string& header_comment) {
    std::ostringstream out;
    if (!header_comment.empty()) {
        std::istringstream lines(header_comment);
        std::string line;
        while (std::getline(lines, line)) out << "# " << line << "\n";
    }
    out << "# dim " << tree.dimensionality << "\n";
    for (const VesselNode& n : tree.nodes) {
        out << n.id << " 7 " << fmt_double(n.x) << " " << fmt_double(n.y) << " "
            << fmt_double(tree.dimensionality == 2 ? 0.0 : n.z) << " " << fmt_double(n.radius)
            << " " << n.parent_id << "\n";
    }
    return out.str();
}

VesselTree swc_read(const std::string& text) {
    VesselTree tree;
    int dim_marker = 0;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::set<int> ids;
    bool any_z = false;
    while (std::getline(in, line)) {
        ++line_no;
        size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        if (line[start] == '#') {
            std::istringstream c(line.substr(start + 1));
            std::string word;
            if (c >> word && word == "dim") {
                int d;
                if (c >> d && (d == 2 || d == 3)) dim_marker = d;
            }
            continue;
        }
        VesselNode n;
        int type;
        std::istringstream fields(line);
        if (!(fields >> n.id >> type >> n.x >> n.y >> n.z >> n.radius >> n.parent_id))
            throw ParseError("swc: malformed node line", line_no);
        std::string extra;
        if (fields >> extra) throw ParseError("swc: trailing fields", line_no);
        if (n.id < 1) throw ParseError("swc: node id must be >= 1", line_no);
        if (ids.count(n.id)) throw ParseError("swc: duplicate id " + std::to_string(n.id), line_no);
        if (n.parent_id != -1 && !ids.count(n.parent_id))
            throw ParseError("swc: parent " + std::to_string(n.parent_id) +
                                 " not defined before node " + std::to_string(n.id),
                             line_no);
        if (n.parent_id != -1 && n.parent_id >= n.id)
            throw ParseError("swc: forward parent reference", line_no);
        if (n.radius < 0) throw ParseError("swc: negative radius", line_no);
        ids.insert(n.id);
        if (n.z != 0) any_z = true;
        tree.nodes.push_back(n);
    }
    if (tree.nodes.empty()) throw ParseError("swc: no nodes");
    tree.dimensionality = dim_marker ? dim_marker : (any_z ? 3 : 2);
    tree.reclassify();
    tree.validate();
    return tree;
}

VesselTree swc_load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return swc_read(buf.str());
}

void swc_save(const VesselTree& tree, const std::string& path, const std::string& header_comment) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << swc_write(tree, header_comment);
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace vrec
