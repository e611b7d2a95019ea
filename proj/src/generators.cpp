#include "rgnn/generators.hpp"

#include <algorithm>
#include <sstream>

#include "rgnn/state_space.hpp"
#include "rgnn/tensor.hpp"

namespace rgnn {

namespace {

const char* kNavigDomain = R"((define (domain navig-xy)
  (:requirements :strips :typing)
  (:types xcoord ycoord)
  (:predicates (succ-x ?a - xcoord ?b - xcoord)
               (succ-y ?a - ycoord ?b - ycoord)
               (at ?x - xcoord ?y - ycoord)
               (blocked ?x - xcoord ?y - ycoord)
               (cell ?x - xcoord ?y - ycoord))
  (:action move-x-up
    :parameters (?from - xcoord ?to - xcoord ?y - ycoord)
    :precondition (and (at ?from ?y) (succ-x ?from ?to) (cell ?to ?y))
    :effect (and (at ?to ?y) (not (at ?from ?y))))
  (:action move-x-down
    :parameters (?from - xcoord ?to - xcoord ?y - ycoord)
    :precondition (and (at ?from ?y) (succ-x ?to ?from) (cell ?to ?y))
    :effect (and (at ?to ?y) (not (at ?from ?y))))
  (:action move-y-up
    :parameters (?x - xcoord ?from - ycoord ?to - ycoord)
    :precondition (and (at ?x ?from) (succ-y ?from ?to) (cell ?x ?to))
    :effect (and (at ?x ?to) (not (at ?x ?from))))
  (:action move-y-down
    :parameters (?x - xcoord ?from - ycoord ?to - ycoord)
    :precondition (and (at ?x ?from) (succ-y ?to ?from) (cell ?x ?to))
    :effect (and (at ?x ?to) (not (at ?x ?from)))))
)";

const char* kVisitallXyDomain = R"((define (domain visitall-xy)
  (:requirements :strips :typing)
  (:types xcoord ycoord)
  (:predicates (succ-x ?a - xcoord ?b - xcoord)
               (succ-y ?a - ycoord ?b - ycoord)
               (at ?x - xcoord ?y - ycoord)
               (cell ?x - xcoord ?y - ycoord)
               (visited ?x - xcoord ?y - ycoord))
  (:action move-x-up
    :parameters (?from - xcoord ?to - xcoord ?y - ycoord)
    :precondition (and (at ?from ?y) (succ-x ?from ?to) (cell ?to ?y))
    :effect (and (at ?to ?y) (visited ?to ?y) (not (at ?from ?y))))
  (:action move-x-down
    :parameters (?from - xcoord ?to - xcoord ?y - ycoord)
    :precondition (and (at ?from ?y) (succ-x ?to ?from) (cell ?to ?y))
    :effect (and (at ?to ?y) (visited ?to ?y) (not (at ?from ?y))))
  (:action move-y-up
    :parameters (?x - xcoord ?from - ycoord ?to - ycoord)
    :precondition (and (at ?x ?from) (succ-y ?from ?to) (cell ?x ?to))
    :effect (and (at ?x ?to) (visited ?x ?to) (not (at ?x ?from))))
  (:action move-y-down
    :parameters (?x - xcoord ?from - ycoord ?to - ycoord)
    :precondition (and (at ?x ?from) (succ-y ?to ?from) (cell ?x ?to))
    :effect (and (at ?x ?to) (visited ?x ?to) (not (at ?x ?from)))))
)";

const char* kVisitallDomain = R"((define (domain visitall)
  (:requirements :strips)
  (:predicates (at ?c) (visited ?c) (connected ?a ?b))
  (:action move
    :parameters (?from ?to)
    :precondition (and (at ?from) (connected ?from ?to))
    :effect (and (at ?to) (visited ?to) (not (at ?from)))))
)";

const char* kGripperDomain = R"((define (domain gripper)
  (:requirements :strips)
  (:predicates (room ?r) (ball ?b) (gripper ?g)
               (at-robby ?r) (at ?b ?r) (free ?g) (carry ?b ?g))
  (:action move
    :parameters (?from ?to)
    :precondition (and (room ?from) (room ?to) (at-robby ?from))
    :effect (and (at-robby ?to) (not (at-robby ?from))))
  (:action pick
    :parameters (?b ?r ?g)
    :precondition (and (ball ?b) (room ?r) (gripper ?g)
                       (at ?b ?r) (at-robby ?r) (free ?g))
    :effect (and (carry ?b ?g) (not (at ?b ?r)) (not (free ?g))))
  (:action drop
    :parameters (?b ?r ?g)
    :precondition (and (ball ?b) (room ?r) (gripper ?g)
                       (carry ?b ?g) (at-robby ?r))
    :effect (and (at ?b ?r) (free ?g) (not (carry ?b ?g))))
  (:action transfer
    :parameters (?b ?from ?to)
    :precondition (and (ball ?b) (gripper ?from) (gripper ?to)
                       (carry ?b ?from) (free ?to))
    :effect (and (carry ?b ?to) (free ?from)
                 (not (carry ?b ?from)) (not (free ?to)))))
)";

// Four-operator blocksworld with an explicit arm object in place of the
// propositional handempty flag (the input builders need every atom to
// mention an object).
const char* kBlocksDomain = R"((define (domain blocks)
  (:requirements :strips :typing)
  (:types block arm)
  (:predicates (on ?x - block ?y - block)
               (ontable ?x - block)
               (clear ?x - block)
               (handfree ?a - arm)
               (holding ?a - arm ?x - block))
  (:action pick-up
    :parameters (?a - arm ?x - block)
    :precondition (and (clear ?x) (ontable ?x) (handfree ?a))
    :effect (and (holding ?a ?x)
                 (not (ontable ?x)) (not (clear ?x)) (not (handfree ?a))))
  (:action put-down
    :parameters (?a - arm ?x - block)
    :precondition (and (holding ?a ?x))
    :effect (and (ontable ?x) (clear ?x) (handfree ?a)
                 (not (holding ?a ?x))))
  (:action stack
    :parameters (?a - arm ?x - block ?y - block)
    :precondition (and (holding ?a ?x) (clear ?y))
    :effect (and (on ?x ?y) (clear ?x) (handfree ?a)
                 (not (holding ?a ?x)) (not (clear ?y))))
  (:action unstack
    :parameters (?a - arm ?x - block ?y - block)
    :precondition (and (clear ?x) (on ?x ?y) (handfree ?a))
    :effect (and (holding ?a ?x) (clear ?y)
                 (not (on ?x ?y)) (not (clear ?x)) (not (handfree ?a)))))
)";

const char* kVacuumDomain = R"((define (domain vacuum)
  (:requirements :strips :typing)
  (:types robot location)
  (:predicates (at ?r - robot ?l - location)
               (adjacent ?r - robot ?x - location ?y - location)
               (dirty ?l - location)
               (cleaned ?l - location))
  (:action move
    :parameters (?r - robot ?x - location ?y - location)
    :precondition (and (at ?r ?x) (adjacent ?r ?x ?y))
    :effect (and (at ?r ?y) (not (at ?r ?x))))
  (:action clean
    :parameters (?r - robot ?l - location)
    :precondition (and (at ?r ?l) (dirty ?l))
    :effect (and (cleaned ?l))))
)";

bool instance_solvable(const GeneratedInstance& generated, std::size_t cap) {
    Instance instance = parse_generated(generated);
    StateSpace space = expand(instance.domain, instance.init, cap);
    std::vector<int> vstar = optimal_values(space);
    return vstar[static_cast<std::size_t>(space.initial)] != kInfiniteValue;
}

std::string coord_name(const char* prefix, int i) {
    return std::string(prefix) + std::to_string(i + 1);
}

}  // namespace

std::string domain_pddl(const std::string& domain_name) {
    if (domain_name == "navig-xy") return kNavigDomain;
    if (domain_name == "visitall-xy") return kVisitallXyDomain;
    if (domain_name == "visitall") return kVisitallDomain;
    if (domain_name == "gripper") return kGripperDomain;
    if (domain_name == "blocks-s" || domain_name == "blocks-m")
        return kBlocksDomain;
    if (domain_name == "vacuum") return kVacuumDomain;
    throw Error("no built-in domain named " + domain_name);
}

Instance parse_generated(const GeneratedInstance& generated) {
    return parse_instance_text(generated.domain_text, generated.problem_text,
                               generated.id);
}

namespace {

struct GridProblem {
    int n, m;
    std::vector<char> blocked;  // n*m, column-major cell (x, y) at x*m + y
    int robot_x, robot_y, goal_x, goal_y;

    bool is_blocked(int x, int y) const {
        return blocked[static_cast<std::size_t>(x * m + y)] != 0;
    }
};

std::string grid_problem_text(const char* domain, const std::string& id,
                              const GridProblem& grid, bool with_blocked,
                              const std::string& goal_section) {
    std::ostringstream out;
    out << "(define (problem " << id << ")\n  (:domain " << domain << ")\n";
    out << "  (:objects";
    for (int x = 0; x < grid.n; ++x) out << " " << coord_name("x", x);
    out << " - xcoord";
    for (int y = 0; y < grid.m; ++y) out << " " << coord_name("y", y);
    out << " - ycoord)\n  (:init\n";
    for (int x = 0; x + 1 < grid.n; ++x)
        out << "    (succ-x " << coord_name("x", x) << " " << coord_name("x", x + 1)
            << ")\n";
    for (int y = 0; y + 1 < grid.m; ++y)
        out << "    (succ-y " << coord_name("y", y) << " " << coord_name("y", y + 1)
            << ")\n";
    for (int x = 0; x < grid.n; ++x)
        for (int y = 0; y < grid.m; ++y) {
            if (grid.is_blocked(x, y)) {
                if (with_blocked)
                    out << "    (blocked " << coord_name("x", x) << " "
                        << coord_name("y", y) << ")\n";
            } else {
                out << "    (cell " << coord_name("x", x) << " "
                    << coord_name("y", y) << ")\n";
            }
        }
    out << "    (at " << coord_name("x", grid.robot_x) << " "
        << coord_name("y", grid.robot_y) << ")\n";
    out << goal_section;
    out << "  )\n";
    return out.str();
}

}  // namespace

GeneratedInstance gen_navig_xy(int n, int m, double obstacle_density,
                               std::uint64_t seed, int retries) {
    if (n < 1 || m < 1) throw Error("grid dimensions must be positive");
    Rng rng(seed);
    for (int attempt = 0; attempt < retries; ++attempt) {
        GridProblem grid;
        grid.n = n;
        grid.m = m;
        grid.blocked.assign(static_cast<std::size_t>(n * m), 0);
        for (char& b : grid.blocked)
            if (rng.uniform() < obstacle_density) b = 1;

        std::vector<int> free_cells;
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < m; ++y)
                if (!grid.is_blocked(x, y)) free_cells.push_back(x * m + y);
        if (free_cells.empty()) continue;

        const int robot = free_cells[rng.below(free_cells.size())];
        int goal = robot;
        if (free_cells.size() > 1) {
            do {
                goal = free_cells[rng.below(free_cells.size())];
            } while (goal == robot);
        }
        grid.robot_x = robot / m;
        grid.robot_y = robot % m;
        grid.goal_x = goal / m;
        grid.goal_y = goal % m;

        GeneratedInstance out;
        out.id = "navig-xy-n" + std::to_string(n) + "m" + std::to_string(m) +
                 "-s" + std::to_string(seed) + "a" + std::to_string(attempt);
        out.domain_text = kNavigDomain;
        std::string body = grid_problem_text("navig-xy", out.id, grid, true, "");
        body += "  (:goal (at " + coord_name("x", grid.goal_x) + " " +
                coord_name("y", grid.goal_y) + "))\n)\n";
        out.problem_text = body;
        if (instance_solvable(out, 100000)) return out;
    }
    throw UnsatisfiableError("no solvable navig-xy instance after retries");
}

GeneratedInstance gen_visitall_xy(int n, int m, int targets, std::uint64_t seed,
                                  int retries) {
    if (n < 1 || m < 1) throw Error("grid dimensions must be positive");
    if (targets < 1 || targets > n * m)
        throw Error("target count out of range");
    Rng rng(seed);
    for (int attempt = 0; attempt < retries; ++attempt) {
        GridProblem grid;
        grid.n = n;
        grid.m = m;
        grid.blocked.assign(static_cast<std::size_t>(n * m), 0);
        const int robot = static_cast<int>(rng.below(static_cast<std::uint64_t>(n * m)));
        grid.robot_x = robot / m;
        grid.robot_y = robot % m;

        std::vector<int> cells(static_cast<std::size_t>(n * m));
        for (int i = 0; i < n * m; ++i) cells[static_cast<std::size_t>(i)] = i;
        rng.shuffle(cells);
        cells.resize(static_cast<std::size_t>(targets));
        std::sort(cells.begin(), cells.end());

        GeneratedInstance out;
        out.id = "visitall-xy-n" + std::to_string(n) + "m" + std::to_string(m) +
                 "-s" + std::to_string(seed) + "a" + std::to_string(attempt);
        out.domain_text = kVisitallXyDomain;
        std::string body = grid_problem_text("visitall-xy", out.id, grid, false, "");
        // the robot's start counts as visited
        body.insert(body.rfind("  )"), "    (visited " +
                                           coord_name("x", grid.robot_x) + " " +
                                           coord_name("y", grid.robot_y) + ")\n");
        body += "  (:goal (and";
        for (int cell : cells)
            body += " (visited " + coord_name("x", cell / m) + " " +
                    coord_name("y", cell % m) + ")";
        body += "))\n)\n";
        out.problem_text = body;
        if (instance_solvable(out, 200000)) return out;
    }
    throw UnsatisfiableError("no solvable visitall-xy instance after retries");
}

GeneratedInstance gen_visitall(int n, int m, int targets, std::uint64_t seed,
                               int retries) {
    if (n < 1 || m < 1) throw Error("grid dimensions must be positive");
    if (targets < 1 || targets > n * m) throw Error("target count out of range");
    Rng rng(seed);
    auto cell_name = [&](int x, int y) {
        return "c" + std::to_string(x + 1) + "-" + std::to_string(y + 1);
    };
    for (int attempt = 0; attempt < retries; ++attempt) {
        const int robot = static_cast<int>(rng.below(static_cast<std::uint64_t>(n * m)));
        std::vector<int> cells(static_cast<std::size_t>(n * m));
        for (int i = 0; i < n * m; ++i) cells[static_cast<std::size_t>(i)] = i;
        rng.shuffle(cells);
        cells.resize(static_cast<std::size_t>(targets));
        std::sort(cells.begin(), cells.end());

        GeneratedInstance out;
        out.id = "visitall-n" + std::to_string(n) + "m" + std::to_string(m) +
                 "-s" + std::to_string(seed) + "a" + std::to_string(attempt);
        out.domain_text = kVisitallDomain;
        std::ostringstream body;
        body << "(define (problem " << out.id << ")\n  (:domain visitall)\n";
        body << "  (:objects";
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < m; ++y) body << " " << cell_name(x, y);
        body << ")\n  (:init\n";
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < m; ++y) {
                if (x + 1 < n)
                    body << "    (connected " << cell_name(x, y) << " "
                         << cell_name(x + 1, y) << ")\n    (connected "
                         << cell_name(x + 1, y) << " " << cell_name(x, y) << ")\n";
                if (y + 1 < m)
                    body << "    (connected " << cell_name(x, y) << " "
                         << cell_name(x, y + 1) << ")\n    (connected "
                         << cell_name(x, y + 1) << " " << cell_name(x, y) << ")\n";
            }
        body << "    (at " << cell_name(robot / m, robot % m) << ")\n";
        body << "    (visited " << cell_name(robot / m, robot % m) << ")\n";
        body << "  )\n  (:goal (and";
        for (int cell : cells)
            body << " (visited " << cell_name(cell / m, cell % m) << ")";
        body << "))\n)\n";
        out.problem_text = body.str();
        if (instance_solvable(out, 200000)) return out;
    }
    throw UnsatisfiableError("no solvable visitall instance after retries");
}

GeneratedInstance gen_gripper(int balls, std::uint64_t seed, int retries) {
    if (balls < 1) throw Error("need at least one ball");
    (void)retries;
    GeneratedInstance out;
    out.id = "gripper-b" + std::to_string(balls) + "-s" + std::to_string(seed);
    out.domain_text = kGripperDomain;
    std::ostringstream body;
    body << "(define (problem " << out.id << ")\n  (:domain gripper)\n";
    body << "  (:objects rooma roomb left right";
    for (int b = 0; b < balls; ++b) body << " ball" << b + 1;
    body << ")\n  (:init\n";
    body << "    (room rooma) (room roomb)\n";
    body << "    (gripper left) (gripper right)\n";
    body << "    (free left) (free right)\n";
    body << "    (at-robby rooma)\n";
    for (int b = 0; b < balls; ++b)
        body << "    (ball ball" << b + 1 << ") (at ball" << b + 1 << " rooma)\n";
    body << "  )\n  (:goal (and";
    for (int b = 0; b < balls; ++b) body << " (at ball" << b + 1 << " roomb)";
    body << "))\n)\n";
    out.problem_text = body.str();
    if (!instance_solvable(out, 200000))
        throw UnsatisfiableError("gripper instance unexpectedly unsolvable");
    return out;
}

GeneratedInstance gen_blocks(bool single_tower, int blocks, std::uint64_t seed,
                             int retries) {
    if (blocks < 1) throw Error("need at least one block");
    Rng rng(seed);
    auto block_name = [](int b) { return "b" + std::to_string(b + 1); };

    auto random_towers = [&](bool one_tower) {
        std::vector<int> order(static_cast<std::size_t>(blocks));
        for (int i = 0; i < blocks; ++i) order[static_cast<std::size_t>(i)] = i;
        rng.shuffle(order);
        std::vector<std::vector<int>> towers;
        for (int b : order) {
            if (towers.empty() || (!one_tower && rng.uniform() < 0.4))
                towers.push_back({b});
            else if (one_tower)
                towers[0].push_back(b);
            else
                towers[rng.below(towers.size())].push_back(b);
        }
        return towers;  // tower[0] is the base
    };

    for (int attempt = 0; attempt < retries; ++attempt) {
        auto init_towers = random_towers(false);
        auto goal_towers = random_towers(single_tower);

        GeneratedInstance out;
        out.id = std::string(single_tower ? "blocks-s" : "blocks-m") + "-b" +
                 std::to_string(blocks) + "-s" + std::to_string(seed) + "a" +
                 std::to_string(attempt);
        out.domain_text = kBlocksDomain;
        std::ostringstream body;
        body << "(define (problem " << out.id << ")\n  (:domain blocks)\n";
        body << "  (:objects";
        for (int b = 0; b < blocks; ++b) body << " " << block_name(b);
        body << " - block arm1 - arm)\n  (:init\n    (handfree arm1)\n";
        for (const auto& tower : init_towers) {
            body << "    (ontable " << block_name(tower[0]) << ")\n";
            for (std::size_t i = 1; i < tower.size(); ++i)
                body << "    (on " << block_name(tower[i]) << " "
                     << block_name(tower[i - 1]) << ")\n";
            body << "    (clear " << block_name(tower.back()) << ")\n";
        }
        body << "  )\n  (:goal (and";
        bool has_atom = false;
        for (const auto& tower : goal_towers) {
            if (tower.size() == 1 && !single_tower) {
                body << " (ontable " << block_name(tower[0]) << ")";
                has_atom = true;
            }
            for (std::size_t i = 1; i < tower.size(); ++i) {
                body << " (on " << block_name(tower[i]) << " "
                     << block_name(tower[i - 1]) << ")";
                has_atom = true;
            }
        }
        if (!has_atom)
            body << " (ontable " << block_name(goal_towers[0][0]) << ")";
        body << "))\n)\n";
        out.problem_text = body.str();
        if (instance_solvable(out, 200000)) return out;
    }
    throw UnsatisfiableError("no solvable blocks instance after retries");
}

GeneratedInstance gen_vacuum(int locations, int robots, std::uint64_t seed,
                             int retries) {
    if (locations < 1 || robots < 1)
        throw Error("need at least one robot and one location");
    Rng rng(seed);
    auto loc_name = [](int l) { return "loc" + std::to_string(l + 1); };
    auto robot_name = [](int r) { return "rob" + std::to_string(r + 1); };
    const int dirty = locations / 2;

    for (int attempt = 0; attempt < retries; ++attempt) {
        std::vector<int> start(static_cast<std::size_t>(robots));
        for (int r = 0; r < robots; ++r)
            start[static_cast<std::size_t>(r)] =
                static_cast<int>(rng.below(static_cast<std::uint64_t>(locations)));

        // per-robot traversal maps; robot 0 always covers the dirty location
        std::vector<std::vector<std::pair<int, int>>> edges(
            static_cast<std::size_t>(robots));
        for (int r = 0; r < robots; ++r) {
            std::vector<int> subset{start[static_cast<std::size_t>(r)]};
            for (int l = 0; l < locations; ++l) {
                if (l == start[static_cast<std::size_t>(r)]) continue;
                if (r == 0 && l == dirty) {
                    subset.push_back(l);
                    continue;
                }
                if (rng.uniform() < 0.6) subset.push_back(l);
            }
            rng.shuffle(subset);
            for (std::size_t i = 1; i < subset.size(); ++i) {
                const int other = subset[rng.below(i)];
                edges[static_cast<std::size_t>(r)].emplace_back(subset[i], other);
            }
            // a few extra edges beyond the random tree
            for (std::size_t i = 0; i + 1 < subset.size(); ++i)
                if (rng.uniform() < 0.3)
                    edges[static_cast<std::size_t>(r)].emplace_back(
                        subset[i], subset[i + 1]);
        }

        GeneratedInstance out;
        out.id = "vacuum-l" + std::to_string(locations) + "r" +
                 std::to_string(robots) + "-s" + std::to_string(seed) + "a" +
                 std::to_string(attempt);
        out.domain_text = kVacuumDomain;
        std::ostringstream body;
        body << "(define (problem " << out.id << ")\n  (:domain vacuum)\n";
        body << "  (:objects";
        for (int r = 0; r < robots; ++r) body << " " << robot_name(r);
        body << " - robot";
        for (int l = 0; l < locations; ++l) body << " " << loc_name(l);
        body << " - location)\n  (:init\n";
        body << "    (dirty " << loc_name(dirty) << ")\n";
        for (int r = 0; r < robots; ++r)
            body << "    (at " << robot_name(r) << " "
                 << loc_name(start[static_cast<std::size_t>(r)]) << ")\n";
        for (int r = 0; r < robots; ++r) {
            std::sort(edges[static_cast<std::size_t>(r)].begin(),
                      edges[static_cast<std::size_t>(r)].end());
            for (const auto& [a, b] : edges[static_cast<std::size_t>(r)]) {
                if (a == b) continue;
                body << "    (adjacent " << robot_name(r) << " " << loc_name(a)
                     << " " << loc_name(b) << ")\n";
                body << "    (adjacent " << robot_name(r) << " " << loc_name(b)
                     << " " << loc_name(a) << ")\n";
            }
        }
        body << "  )\n  (:goal (cleaned " << loc_name(dirty) << "))\n)\n";
        out.problem_text = body.str();
        if (instance_solvable(out, 200000)) return out;
    }
    throw UnsatisfiableError("no solvable vacuum instance after retries");
}

GeneratedInstance generate(const std::string& domain_name, int n, int m,
                           double density, int targets, int count_param,
                           std::uint64_t seed) {
    if (domain_name == "navig-xy") return gen_navig_xy(n, m, density, seed);
    if (domain_name == "visitall-xy") return gen_visitall_xy(n, m, targets, seed);
    if (domain_name == "visitall") return gen_visitall(n, m, targets, seed);
    if (domain_name == "gripper") return gen_gripper(count_param, seed);
    if (domain_name == "blocks-s") return gen_blocks(true, count_param, seed);
    if (domain_name == "blocks-m") return gen_blocks(false, count_param, seed);
    if (domain_name == "vacuum") return gen_vacuum(n, count_param, seed);
    throw Error("no built-in generator named " + domain_name);
}

std::vector<char> vacuum_reach_set(const RelationalState& state, ObjectId robot,
                                   int k) {
    const std::size_t n = state.objects.size();
    const PredicateId dirty = state.vocab.id("dirty");
    const PredicateId adjacent = state.vocab.id("adjacent");

    std::vector<char> current(n, 0);
    for (const Atom& atom : state.atoms)
        if (atom.predicate == dirty)
            current[static_cast<std::size_t>(atom.args[0])] = 1;

    // adjacency of this robot's map
    std::vector<std::vector<ObjectId>> next_of(n);
    for (const Atom& atom : state.atoms)
        if (atom.predicate == adjacent && atom.args[0] == robot)
            next_of[static_cast<std::size_t>(atom.args[1])].push_back(atom.args[2]);

    for (int level = 0; level < k; ++level) {
        std::vector<char> next(n, 0);
        for (std::size_t x = 0; x < n; ++x)
            for (ObjectId y : next_of[x])
                if (current[static_cast<std::size_t>(y)]) next[x] = 1;
        current = std::move(next);
    }
    return current;
}

bool vacuum_reachable(const RelationalState& state, ObjectId robot,
                      ObjectId location, int k) {
    return vacuum_reach_set(state, robot, k)[static_cast<std::size_t>(location)] != 0;
}

int vacuum_best_distance(const RelationalState& state, int cap) {
    const PredicateId at = state.vocab.id("at");
    int best = -1;
    for (const Atom& atom : state.atoms) {
        if (atom.predicate != at) continue;
        const ObjectId robot = atom.args[0];
        const ObjectId location = atom.args[1];
        for (int k = 0; k <= cap; ++k) {
            if (vacuum_reachable(state, robot, location, k)) {
                if (best < 0 || k < best) best = k;
                break;
            }
        }
    }
    return best;
}

}  // namespace rgnn
