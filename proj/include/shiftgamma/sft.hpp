#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "shiftgamma/metric.hpp"

namespace shiftgamma {

// A directed multigraph edge. `symbol` indexes into the owning shift's
// alphabet and is what the edge writes into a configuration; for graphs built
// directly from edge lists each edge emits its own id, while graphs obtained
// by recoding a forbidden-word description emit the first letter of the block
// the edge represents. All distance and disagreement computations read
// emitted symbols, never internal edge identity.
struct SftEdge {
    std::string id;
    int from = 0;
    int to = 0;
    int symbol = 0;
};

// An edge shift of finite type in essential form: every vertex has an
// incoming and an outgoing edge, so every edge extends to a bi-infinite path.
// Vertices are sorted by name and edges by id, which fixes the tie-breaking
// order used by all searches.
class EdgeSft {
public:
    EdgeSft() = default;
    EdgeSft(std::vector<std::string> vertices, std::vector<SftEdge> edges, Alphabet alphabet);

    const std::vector<std::string>& vertices() const { return vertices_; }
    const std::vector<SftEdge>& edges() const { return edges_; }
    const Alphabet& alphabet() const { return alphabet_; }
    const std::vector<std::vector<int>>& out_edges() const { return out_; }
    const std::vector<std::vector<int>>& in_edges() const { return in_; }

    int vertex_count() const { return static_cast<int>(vertices_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    bool empty() const { return vertices_.empty(); }
    int vertex_index(const std::string& name) const;

private:
    std::vector<std::string> vertices_;
    std::vector<SftEdge> edges_;
    Alphabet alphabet_;
    std::vector<std::vector<int>> out_;
    std::vector<std::vector<int>> in_;
};

// Builds an edge shift from raw (id, from, to) triples; each edge emits its
// own id as symbol. The result is essentialized and may be empty.
EdgeSft make_edge_sft(const std::vector<std::string>& vertices,
                      const std::vector<std::tuple<std::string, std::string, std::string>>& edges);

// Repeatedly removes vertices lacking an incoming or outgoing edge.
EdgeSft essentialize(const EdgeSft& s);

// Recodes the subshift over `alphabet` avoiding the given factor words into a
// conjugate edge shift whose edges emit original letters. Throws DomainError
// if the subshift is empty or the recoding window is unreasonably large.
EdgeSft higher_block(const Alphabet& alphabet, const std::vector<std::string>& forbidden);

// Parses either a JSON graph {"vertices": [...], "edges": [{"id","from","to"}]},
// a JSON word description {"alphabet": [...], "forbidden": [...]}, or a plain
// text forbidden-word file (first line: alphabet letters separated by spaces;
// each further nonempty line: one forbidden word). Throws ParseError with a
// location on malformed input or when the described subshift is empty.
EdgeSft parse_sft(const std::string& text, const std::string& source_name = "<input>");

// Topological entropy log(spectral radius), maximized over strongly connected
// components. Power iteration is run until the Perron enclosure is tighter
// than `tol`.
double entropy(const EdgeSft& s, double tol = 1e-12);

struct PointCountClass {
    enum class Kind { Empty, Finite, Infinite };
    Kind kind = Kind::Empty;
    // Number of periodic orbits of period at most the requested bound; only
    // meaningful for Finite.
    long orbit_count = 0;

    bool operator==(const PointCountClass&) const = default;
};

// Empty, Finite with an orbit count, or Infinite. A component supports
// infinitely many points exactly when it has more internal edges than
// vertices; otherwise each cycle component contributes one orbit when its
// length is within `max_period`.
PointCountClass classify_point_count(const EdgeSft& s, int max_period);

// An eventually periodic bi-infinite edge path: `middle` occupies positions
// [middle_start, middle_start + middle.size()), `left_cycle` tiles every
// position below and `right_cycle` every position above. Entries are edge
// indices. Cycles must be nonempty closed paths; the whole sequence must
// chain head to tail.
struct PathPoint {
    std::vector<int> left_cycle;
    std::vector<int> middle;
    std::vector<int> right_cycle;
    long middle_start = 0;

    int edge_at(long i) const;
};

struct PairWitness {
    enum class Kind { Homoclinic, ForwardAsymptotic, BackwardAsymptotic };
    Kind kind = Kind::Homoclinic;
    PathPoint x;
    PathPoint y;
    // For homoclinic witnesses, the positions of the first and last
    // emitted-symbol disagreement. Forward witnesses guarantee agreement
    // right of hi and backward witnesses left of lo; the opposite field then
    // only records the extreme disagreement within the middle segment.
    long disagreement_lo = 0;
    long disagreement_hi = 0;
};

enum class AsymptoticDirection { Forward, Backward };

// Searches for two distinct points agreeing outside a finite window. Returns
// the witness with the fewest transitions between diagonal departures,
// breaking ties by vertex and edge order; nullopt when every point pair
// agreeing outside a window is equal.
std::optional<PairWitness> find_homoclinic_pair(const EdgeSft& s);

// Produces two distinct points that merge in the requested direction. Only
// defined for shifts classified Infinite, where success is guaranteed; throws
// DomainError otherwise.
PairWitness find_asymptotic_pair(const EdgeSft& s, AsymptoticDirection dir);

// Emitted symbols of `p` over [lo, hi] as a configuration usable with the
// shift metric.
FiniteConfiguration symbol_window(const EdgeSft& s, const PathPoint& p, long lo, long hi);

// Throws PreconditionError if `p` is not a legal path in `s` (bad indices,
// open cycles, or consecutive edges that do not chain).
void validate_point(const EdgeSft& s, const PathPoint& p);

// Replays a witness against the shift: both points must be legal, the pair
// must disagree, and the disagreement pattern must match the witness kind
// (confined to [lo, hi] for homoclinic, vanishing rightward of hi for
// forward, leftward of lo for backward). Throws PreconditionError otherwise.
void validate_witness(const EdgeSft& s, const PairWitness& w);

nlohmann::ordered_json witness_to_json(const EdgeSft& s, const PairWitness& w);
PairWitness witness_from_json(const EdgeSft& s, const nlohmann::ordered_json& j);

nlohmann::ordered_json path_point_to_json(const EdgeSft& s, const PathPoint& p);
PathPoint path_point_from_json(const EdgeSft& s, const nlohmann::ordered_json& j);

} // namespace shiftgamma
