#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cgmp/bvh.hpp"
#include "cgmp/collision.hpp"
#include "cgmp/robot.hpp"

namespace cgmp {

// A mesh (in its own frame, stored in `mesh_file`) placed at `pose`.
struct PlacedMesh {
  std::string name;
  std::string mesh_file;  // relative to the manifest directory
  TriangleMesh mesh;
  Transform pose;

  friend bool operator==(const PlacedMesh&, const PlacedMesh&) = default;
};

struct Scenario {
  std::string id;      // "011" .. "045"
  std::string family;  // shelf | under-table | narrow-gap | narrow-opening
  int level = 1;
  double difficulty_parameter = 0.0;  // setback or opening width, m

  std::string robot_file = "robot.json";
  std::string gripper_file = "gripper.obj";
  KinematicChain robot;
  TriangleMesh gripper;

  std::array<double, 2> base_x{};
  std::array<double, 2> base_y{};
  Configuration q_start = Configuration::Zero();
  bool floor = true;

  std::vector<PlacedMesh> obstacles;
  PlacedMesh target;

  std::string grasps_file;  // empty when not annotated
  std::string ik_file;

  // Directory the manifest was loaded from; not part of the data model.
  std::filesystem::path directory;

  friend bool operator==(const Scenario& a, const Scenario& b);
};

Scenario load_scenario(const std::filesystem::path& manifest);
// Writes the manifest plus the robot, gripper and mesh files it references,
// all into the manifest's directory.
void save_scenario(const Scenario& s, const std::filesystem::path& manifest);

std::filesystem::path resolve(const Scenario& s, const std::string& relative);

// Everything a planner or annotator needs, in world coordinates.
struct AssembledScenario {
  KinematicChain chain;  // robot with the scenario's base limits
  CollisionScene scene;
  IndexedMesh gripper;
  IndexedMesh object;
  Configuration q_start;
};

AssembledScenario assemble(const Scenario& s);

// Static checks of the Scenario invariants; returns human-readable problems.
std::vector<std::string> check_scenario(const Scenario& s);

enum class Family { kShelf = 1, kUnderTable = 2, kNarrowGap = 3, kNarrowOpening = 4 };

const char* family_name(Family f);
Family family_from_name(const std::string& name);

struct FamilySpec {
  Family family = Family::kShelf;
  // Object setbacks (increasing) for shelf and under-table, opening widths
  // (decreasing) for narrow-gap and narrow-opening, meters.
  std::array<double, 5> schedule{};
};

FamilySpec default_family_spec(Family f);
void validate_schedule(const FamilySpec& spec);

// The procedural target object used by a family when none is supplied.
TriangleMesh default_family_object(Family f);

// Five scenarios for one family. A user `object` replaces the built-in one;
// it is re-centred so its footprint is centred on the origin and it rests on
// z = 0. `robot` and `gripper` are embedded in every scenario.
std::vector<Scenario> generate_family(const FamilySpec& spec, const KinematicChain& robot,
                                      const TriangleMesh& gripper,
                                      const std::optional<TriangleMesh>& object,
                                      std::uint64_t seed);

// Start configuration shared by every generated scenario: base at the origin,
// arm in its ready pose.
Configuration default_start_configuration();

}  // namespace cgmp
