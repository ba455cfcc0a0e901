#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace dani {

using NodeId = std::uint32_t;

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

// One contagion trace: (node, infection time) pairs. Times may be infinite,
// meaning the node never got infected; such entries are kept here but dropped
// by the label transform.
struct Cascade {
    struct Entry {
        NodeId node;
        double time;
    };
    std::vector<Entry> entries;
};

// A cascade after the label transform: finite-time entries sorted by
// (time, node) and labeled 1..n in that order.
struct CascadeVector {
    struct Entry {
        NodeId node;
        std::uint32_t label;
    };
    std::vector<Entry> entries;

    std::size_t size() const { return entries.size(); }
};

struct CascadeSet {
    std::vector<Cascade> cascades;
    std::vector<NodeId> node_universe;  // sorted, finite-time participants only

    std::size_t size() const { return cascades.size(); }
};

struct CascadeStats {
    std::size_t count = 0;
    double mean_length = 0.0;
    std::size_t max_length = 0;
    std::size_t node_count = 0;
};

enum class CascadeFormat { snap, tsv };

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

CascadeVector to_cascade_vector(const Cascade& c);

std::vector<CascadeVector> to_cascade_vectors(const CascadeSet& cs);

CascadeStats cascade_stats(const CascadeSet& cs);

// Recomputes node_universe from the cascade list.
void rebuild_node_universe(CascadeSet& cs);

CascadeSet parse_cascades(const std::string& path, CascadeFormat format);
CascadeSet parse_cascades_stream(std::istream& in, CascadeFormat format);

void write_cascades(const CascadeSet& cs, const std::string& path,
                    CascadeFormat format);
void write_cascades_stream(const CascadeSet& cs, std::ostream& out,
                           CascadeFormat format);

}  // namespace dani
