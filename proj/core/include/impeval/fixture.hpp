#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "impeval/corpus.hpp"
#include "impeval/lexicon.hpp"

namespace impeval {

// Parameters for the synthetic corpus generator. Output is a pure function
// of this struct: same spec, byte-identical corpus.
struct FixtureSpec {
    std::uint64_t seed = 7;
    std::size_t n_reports = 100;
    std::size_t n_patients = 20;
    // tag -> positive weight, in declaration order
    std::vector<std::pair<std::string, double>> tracer_mix = {
        {"FDG", 0.80}, {"dopamine", 0.08}, {"amyloid", 0.07}, {"tau", 0.05}};
    double train_fraction = 0.8;
    double validation_fraction = 0.1; // test split takes the remainder
};

// Ground truth for one synthetic report: exactly the dictionary terms the
// generator planted, i.e. what extraction over the fixture lexicon must
// find.
struct SidecarEntry {
    std::string id;
    std::vector<std::string> findings_entities;   // sorted, unique
    std::vector<std::string> impression_entities; // sorted, unique
};

struct Fixture {
    Corpus corpus;
    std::vector<SidecarEntry> sidecar; // aligned with corpus order
};

// The dictionary the generator plants terms from; ship it next to the
// corpus so the whole pipeline is self-contained.
Lexicon fixture_lexicon();

// Builds a corpus with patient-level split assignment, findings averaging
// near 870 characters and impressions near 240. Throws ArgumentError for
// zero patients or non-positive tracer weights.
Fixture generate_fixture(const FixtureSpec& spec);

// Writes corpus.jsonl, sidecar.jsonl and lexicon.txt into `dir`.
void write_fixture(const Fixture& fixture, const std::filesystem::path& dir);

void save_sidecar(const std::vector<SidecarEntry>& sidecar,
                  const std::filesystem::path& path);
std::vector<SidecarEntry> load_sidecar(const std::filesystem::path& path);

} // namespace impeval
