#include "park/world_graph.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

using namespace park;

namespace {

Topology mini_topology() {
    std::istringstream in(
        "# two gates, one road, two spaces\n"
        "node G g1\n"
        "node G g2\n"
        "node R r1\n"
        "node P p010\n"
        "node P p018\n"
        "edge g1 r1\n"
        "edge r1 g1\n"
        "edge g2 r1\n"
        "edge r1 p010\n"
        "edge r1 p018\n");
    return parse_topology(in, "<mini>");
}

TEST(Topology, ParsesFixtureLabels) {
    std::ifstream in(PARK_FIXTURE_DIR "/parking.topo");
    ASSERT_TRUE(in) << "fixture missing";
    Topology topo = parse_topology(in, "parking.topo");
    ILAGraph g = build_parking(topo);
    for (const char* label : {"g1", "g2", "g3", "p010", "p015", "p018"})
        EXPECT_TRUE(has_vertex(g, label)) << label;
    EXPECT_EQ(gate_labels(g), (std::set<std::string>{"g1", "g2", "g3"}));
    EXPECT_EQ(free_spaces(g).size(), 20u);
}

TEST(Topology, Errors) {
    std::istringstream bad_kind("node Q x1\n");
    EXPECT_THROW(parse_topology(bad_kind, "<t>"), error);
    std::istringstream bad_record("vertex G g1\n");
    EXPECT_THROW(parse_topology(bad_record, "<t>"), error);
    std::istringstream short_edge("edge g1\n");
    EXPECT_THROW(parse_topology(short_edge, "<t>"), error);
    try {
        std::istringstream in("node G g1\n\nnode Q x\n");
        parse_topology(in, "topo.txt");
        FAIL();
    } catch (const error& e) {
        EXPECT_NE(std::string(e.what()).find("topo.txt:3"), std::string::npos)
            << e.what();
    }
}

TEST(BuildParking, EmptyTopology) {
    ILAGraph g = build_parking(Topology{});
    EXPECT_TRUE(g.base.vertices.empty());
    EXPECT_TRUE(g.base.edges.empty());
    EXPECT_TRUE(free_spaces(g).empty());
}

TEST(BuildParking, FreshSpacesAreFree) {
    ILAGraph g = build_parking(mini_topology());
    EXPECT_EQ(free_spaces(g), (std::set<std::string>{"p010", "p018"}));
    // P vertices declare the free attribute; its value is instantiated
    EXPECT_TRUE(g.base.vertices.at("p010").attributes.count("free"));
    EXPECT_EQ(std::get<bool>(g.vertex_values.at({"p010", "free"})), true);
}

TEST(BuildParking, DuplicateLabel) {
    Topology topo = mini_topology();
    topo.nodes.push_back({NodeKind::Road, "g1"});
    EXPECT_THROW(build_parking(topo), error);
}

TEST(BuildParking, EdgeToUnknownLabel) {
    Topology topo = mini_topology();
    topo.edges.push_back({"r1", "ghost"});
    EXPECT_THROW(build_parking(topo), error);
}

TEST(Cars, AddCar) {
    ILAGraph g = build_parking(mini_topology());
    ILAGraph g2 = add_car(g, "idOla91", "g2");
    EXPECT_TRUE(has_vertex(g2, "idOla91"));
    EXPECT_EQ(kind_of(g2, "idOla91"), NodeKind::Car);
    EXPECT_EQ(car_position(g2, "idOla91"), "g2");
    // original untouched
    EXPECT_FALSE(has_vertex(g, "idOla91"));
    EXPECT_THROW(add_car(g2, "idOla91", "g1"), error);   // duplicate
    EXPECT_THROW(add_car(g, "c1", "p010"), error);        // not a gate
    EXPECT_THROW(add_car(g, "c1", "nowhere"), error);     // unknown
}

TEST(Cars, MoveOccupiesAndFrees) {
    ILAGraph g = add_car(build_parking(mini_topology()), "idOla91", "g2");
    g = move_car(g, "idOla91", "p018");
    EXPECT_EQ(free_spaces(g), std::set<std::string>{"p010"});
    EXPECT_EQ(car_position(g, "idOla91"), "p018");
    g = move_car(g, "idOla91", "r1");
    EXPECT_EQ(free_spaces(g), (std::set<std::string>{"p010", "p018"}));
    EXPECT_THROW(move_car(g, "ghost", "p010"), error);
    EXPECT_THROW(move_car(g, "idOla91", "missing"), error);
}

TEST(Cars, MoveOntoOccupiedSpaceFails) {
    ILAGraph g = build_parking(mini_topology());
    g = add_car(g, "a", "g1");
    g = add_car(g, "b", "g2");
    g = move_car(g, "a", "p018");
    EXPECT_THROW(move_car(g, "b", "p018"), error);
    // moving a car onto the space it already occupies is a no-op
    EXPECT_NO_THROW(move_car(g, "a", "p018"));
    EXPECT_EQ(free_spaces(move_car(g, "a", "p018")),
              std::set<std::string>{"p010"});
}

TEST(Cars, RemoveRestoresGraph) {
    ILAGraph g = build_parking(mini_topology());
    ILAGraph with_car = add_car(g, "idOla91", "g2");
    EXPECT_EQ(remove_car(with_car, "idOla91"), g);
    ILAGraph parked = move_car(with_car, "idOla91", "p018");
    ILAGraph after = remove_car(parked, "idOla91");
    EXPECT_EQ(free_spaces(after), (std::set<std::string>{"p010", "p018"}));
    EXPECT_EQ(after, g);
    EXPECT_THROW(remove_car(g, "idOla91"), error);
}

TEST(Cars, RemoveAfterParkAtP015FreesIt) {
    std::istringstream in(
        "node G g2\nnode P p015\nedge g2 p015\n");
    ILAGraph g = build_parking(parse_topology(in, "<t>"));
    g = add_car(g, "idOla91", "g2");
    g = move_car(g, "idOla91", "p015");
    EXPECT_TRUE(free_spaces(g).empty());
    g = remove_car(g, "idOla91");
    EXPECT_EQ(free_spaces(g), std::set<std::string>{"p015"});
}

// Random walks keep every structural invariant intact.
TEST(Invariants, RandomOperationSequences) {
    std::mt19937 rng(555);
    const std::vector<std::string> cars = {"c1", "c2", "c3", "c4"};
    Topology topo = mini_topology();
    ILAGraph fresh = build_parking(topo);

    auto check_invariants = [&](const ILAGraph& g) {
        // E subset of V x V
        for (const auto& [from, to] : g.base.edges) {
            ASSERT_TRUE(g.base.vertices.count(from)) << from;
            ASSERT_TRUE(g.base.vertices.count(to)) << to;
        }
        // every car: out-degree 1, in-degree 0
        std::map<std::string, int> out_deg, in_deg;
        for (const auto& [from, to] : g.base.edges) {
            ++out_deg[from];
            ++in_deg[to];
        }
        std::map<std::string, int> space_occupants;
        for (const auto& [label, decl] : g.base.vertices) {
            if (decl.kind != NodeKind::Car) continue;
            EXPECT_EQ(out_deg[label], 1) << label;
            EXPECT_EQ(in_deg[label], 0) << label;
            std::string pos = car_position(g, label);
            if (kind_of(g, pos) == NodeKind::Space) ++space_occupants[pos];
        }
        // free(p) false iff exactly one car edge targets p
        for (const auto& [label, decl] : g.base.vertices) {
            if (decl.kind != NodeKind::Space) continue;
            bool free = free_spaces(g).count(label) != 0;
            EXPECT_EQ(space_occupants[label], free ? 0 : 1) << label;
        }
    };

    for (int round = 0; round < 1000; ++round) {
        ILAGraph g = fresh;
        std::uniform_int_distribution<int> len_dist(1, 12);
        std::uniform_int_distribution<int> op_dist(0, 2);
        std::uniform_int_distribution<std::size_t> car_dist(0, cars.size() - 1);
        int steps = len_dist(rng);
        for (int s = 0; s < steps; ++s) {
            const std::string& car = cars[car_dist(rng)];
            try {
                switch (op_dist(rng)) {
                    case 0: g = add_car(g, car, rng() % 2 ? "g1" : "g2"); break;
                    case 1: {
                        const char* targets[] = {"r1", "p010", "p018", "g1"};
                        g = move_car(g, car, targets[rng() % 4]);
                        break;
                    }
                    default: g = remove_car(g, car); break;
                }
            } catch (const error&) {
                // rejected operations must leave no trace; g is unchanged
            }
        }
        check_invariants(g);
    }
}

}  // namespace
