#pragma once

#include "laxkit/calogero.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace laxkit {

struct SuiteCheck {
    std::string name;
    bool passed = true;
    long count = 0;        // number of instances examined
    double value = 0;      // worst measured quantity, where one applies
    double threshold = 0;  // limit the value is compared against (0 when exact)
    std::string detail;    // first counterexample or a short note
};

struct SuiteReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<SuiteCheck> checks;
    double seconds = 0;

    bool passed() const;
    // First failing check, formatted; empty when all pass.
    std::string counterexample() const;
};

// closure, dims, cocycle, poles, mops, identities, weierstrass, conservation, involution, residues, tyurin.
const std::vector<std::string>& suite_names();
// Throws std::invalid_argument for an unknown name.
SuiteReport run_suite(const std::string& name, std::uint64_t seed);

// Lattice with half-periods 4 and 4i used by the Calogero-Moser suites; B-family q0 = 2 + 2.8i.
CMSystem suite_system(Family family, int n);
// Generic spectral parameters for the isospectrality checks on suite_system().
std::vector<cplx> suite_spectral_points();

struct ConservationSample {
    double t = 0;
    CMState state;
    cplx h;
    std::vector<cplx> traces;  // tr L(z_k)^p for each spectral point z_k and p = 2..4
};

struct ConservationRun {
    std::vector<ConservationSample> samples;
    double max_h_drift = 0;     // max |H(t) - H(0)| / |H(0)|
    double max_spec_drift = 0;  // eigenvalue-multiset drift over all spectral points
    bool aborted = false;
    std::string reason;
};

ConservationRun run_conservation(const CMSystem& sys, const CMState& s0, double T, double dt, Scheme scheme,
                                 const std::vector<cplx>& z_points, int sample_every);

struct BracketEntry {
    int p = 0, q = 0;  // H_{p,1} and H_{q,1}
    cplx value;
};

// Pairwise brackets of residue Hamiltonians H_{p,1} for p in `powers` at one state.
std::vector<BracketEntry> bracket_table(const CMSystem& sys, const CMState& s, const std::vector<int>& powers);

}  // namespace laxkit
