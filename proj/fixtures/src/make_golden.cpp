// Writes the bundled end-to-end inputs: fixture dataset, projection, and an
// agent-recorded trajectory for the easy and hard tasks.

#include "distbrush/fixtures/agent.hpp"
#include "distbrush/fixtures/generate.hpp"
#include "distbrush/metrics.hpp"

#include <filesystem>
#include <iostream>

using namespace distbrush;

namespace {

void write_task(const std::filesystem::path& dir, const std::string& name, const fixtures::FixtureSpec& spec,
                std::size_t clusters) {
    const fixtures::Fixture fx = fixtures::generate(spec);
    auto model = std::make_shared<const SnnModel>(build_snn_model(build_knn(fx.data, 10)));
    fixtures::AgentConfig agent;
    agent.clusters = clusters;
    const Trajectory traj = fixtures::run_agent(fx.data, fx.projection, model, {}, agent);

    Session session(fx.data, fx.projection, model);
    fixtures::replay(session, traj);
    const ClusteringScores s = clustering_scores(session.export_labels(), fx.truth);

    save_dataset(fx.data, dir / (name + "_dataset.csv"));
    save_projection(fx.projection, dir / (name + "_projection.csv"));
    write_file_atomic(dir / (name + "_trajectory.json"), trajectory_to_string(traj));
    std::cout << name << ": " << traj.events.size() << " events, ami " << s.ami << ", arand " << s.arand
              << ", vmeasure " << s.vmeasure << ", unassigned " << s.unassignedFraction << "\n";
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: distbrush_make_golden <output dir>\n";
        return 2;
    }
    const std::filesystem::path dir = argv[1];
    std::filesystem::create_directories(dir);
    write_task(dir, "easy_twoBlobs", fixtures::easy_task_spec(), 2);
    write_task(dir, "hard_threeBlobs", fixtures::hard_task_spec(), 3);
    return 0;
}
