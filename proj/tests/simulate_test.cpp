#include "lops/simulate.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"

namespace {

using namespace lops;
namespace tu = lops::testutil;

constexpr double kSqrtHalf = 0.70710678118654752440;

ModeUnitary random_mode_unitary(const ModeRegistry& reg, std::mt19937& gen) {
    return {reg, tu::random_unitary(static_cast<int>(reg.num_modes()), gen)};
}

TEST(ApplyUnitaryTest, SinglePhotonFollowsTheColumn) {
    ModeRegistry reg({"A", "B"});
    std::mt19937 gen(tu::kSeed + 10);
    ModeUnitary u = random_mode_unitary(reg, gen);
    FockState out = apply_unitary(single_photon(mode_h("A"), reg), u);
    const auto col = static_cast<Eigen::Index>(reg.mode_index(mode_h("A")));
    for (std::size_t k = 0; k < reg.num_modes(); ++k) {
        Occupation occ = empty_occupation(reg);
        occ.counts[k] = 1;
        EXPECT_LT(std::abs(out.amplitude(occ) - u.matrix(static_cast<Eigen::Index>(k), col)),
                  1e-13);
    }
}

TEST(ApplyUnitaryTest, IdentityLeavesStatesAlone) {
    ModeRegistry reg({"A", "B"});
    std::mt19937 gen(tu::kSeed + 11);
    FockState s = tu::random_state(reg, 3, 6, gen);
    EXPECT_LT(tu::max_amplitude_diff(apply_unitary(s, identity_unitary(reg)), s), 1e-13);
}

// Two indistinguishable photons on a 50:50 beamsplitter bunch: the
// coincidence amplitude vanishes and both pair amplitudes are 1/sqrt2.
TEST(ApplyUnitaryTest, HongOuMandel) {
    ModeRegistry reg({"A", "B", "C", "D"});
    FockState in = product_state({mode_h("A"), mode_h("B")}, reg);
    FockState out = apply_unitary(in, beamsplitter_50("A", "B", "C", "D", reg));
    EXPECT_NEAR(out.amplitude(occupation_of(reg, {{mode_h("C"), 2}})).real(), kSqrtHalf, 1e-14);
    EXPECT_NEAR(out.amplitude(occupation_of(reg, {{mode_h("D"), 2}})).real(), -kSqrtHalf, 1e-14);
    EXPECT_EQ(out.amplitude(occupation_of(reg, {{mode_h("C"), 1}, {mode_h("D"), 1}})),
              Complex(0.0, 0.0));
    EXPECT_NEAR(norm_squared(out), 1.0, 1e-13);
}

// Distinguishable polarizations do not interfere: all four outcomes at 1/2.
TEST(ApplyUnitaryTest, CrossPolarizedPhotonsDoNotBunch) {
    ModeRegistry reg({"A", "B", "C", "D"});
    FockState in = product_state({mode_h("A"), mode_v("B")}, reg);
    FockState out = apply_unitary(in, beamsplitter_50("A", "B", "C", "D", reg));
    EXPECT_NEAR(out.amplitude(occupation_of(reg, {{mode_h("C"), 1}, {mode_v("C"), 1}})).real(), 0.5,
                1e-14);
    EXPECT_NEAR(out.amplitude(occupation_of(reg, {{mode_h("D"), 1}, {mode_v("D"), 1}})).real(),
                -0.5, 1e-14);
    EXPECT_NEAR(out.amplitude(occupation_of(reg, {{mode_h("C"), 1}, {mode_v("D"), 1}})).real(),
                -0.5, 1e-14);
    EXPECT_NEAR(out.amplitude(occupation_of(reg, {{mode_h("D"), 1}, {mode_v("C"), 1}})).real(), 0.5,
                1e-14);
}

TEST(ApplyUnitaryTest, RegistryMismatchThrows) {
    ModeRegistry reg({"A"});
    ModeRegistry other({"B"});
    EXPECT_THROW(apply_unitary(vacuum_state(reg), identity_unitary(other)), std::invalid_argument);
}

TEST(ApplyUnitaryPropertyTest, ConservesNormAndPhotonNumber) {
    std::mt19937 gen(tu::kSeed + 12);
    ModeRegistry reg({"A", "B", "C"});
    for (int trial = 0; trial < 25; ++trial) {
        const int photons = 1 + static_cast<int>(gen() % 4);
        FockState s = tu::random_state(reg, photons, 8, gen);
        FockState out = apply_unitary(s, random_mode_unitary(reg, gen));
        EXPECT_NEAR(norm_squared(out), 1.0, 1e-11);
        for (const auto& [occ, amp] : out.terms()) EXPECT_EQ(occ.total(), photons);
    }
}

TEST(ApplyUnitaryPropertyTest, Linearity) {
    std::mt19937 gen(tu::kSeed + 13);
    ModeRegistry reg({"A", "B"});
    for (int trial = 0; trial < 10; ++trial) {
        FockState a = tu::random_state(reg, 2, 5, gen);
        FockState b = tu::random_state(reg, 2, 5, gen);
        const Complex alpha{0.3, -0.4}, beta{-0.7, 0.2};
        ModeUnitary u = random_mode_unitary(reg, gen);
        FockState lhs = apply_unitary(add(scale(a, alpha), scale(b, beta)), u);
        FockState rhs = add(scale(apply_unitary(a, u), alpha), scale(apply_unitary(b, u), beta));
        EXPECT_LT(tu::max_amplitude_diff(lhs, rhs), 1e-11);
    }
}

TEST(ApplyUnitaryPropertyTest, CompositionMatchesMatrixProduct) {
    std::mt19937 gen(tu::kSeed + 14);
    ModeRegistry reg({"A", "B"});
    FockState s = tu::random_state(reg, 3, 6, gen);
    ModeUnitary u = random_mode_unitary(reg, gen);
    ModeUnitary v = random_mode_unitary(reg, gen);
    ModeUnitary vu{reg, v.matrix * u.matrix};
    EXPECT_LT(tu::max_amplitude_diff(apply_unitary(apply_unitary(s, u), v), apply_unitary(s, vu)),
              1e-10);
}

TEST(PostSelectTest, CoincidenceFilterAndRenormalization) {
    ModeRegistry reg({"A", "B", "C", "D"});
    FockState in = product_state({mode_h("A"), mode_v("B")}, reg);
    FockState out = apply_unitary(in, beamsplitter_50("A", "B", "C", "D", reg));
    PostSelectionOutcome sel = post_select(out, {{"C", "D"}});
    EXPECT_NEAR(sel.probability, 0.5, 1e-14);
    EXPECT_EQ(sel.state.terms().size(), 2u);
    EXPECT_NEAR(norm_squared(sel.state), 1.0, 1e-13);
    EXPECT_NEAR(sel.state.amplitude(occupation_of(reg, {{mode_h("C"), 1}, {mode_v("D"), 1}})).real(),
                -kSqrtHalf, 1e-13);
    EXPECT_NEAR(sel.state.amplitude(occupation_of(reg, {{mode_v("C"), 1}, {mode_h("D"), 1}})).real(),
                kSqrtHalf, 1e-13);
    // projecting an already-conforming state is the identity with p = 1
    PostSelectionOutcome again = post_select(sel.state, {{"C", "D"}});
    EXPECT_NEAR(again.probability, 1.0, 1e-13);
    EXPECT_LT(tu::max_amplitude_diff(again.state, sel.state), 1e-13);
}

TEST(PostSelectTest, PolarizationBlindness) {
    ModeRegistry reg({"A"});
    // one H photon or one V photon both pass a rule on {A}
    FockState h = single_photon(mode_h("A"), reg);
    FockState v = single_photon(mode_v("A"), reg);
    FockState mix = add(scale(h, kSqrtHalf), scale(v, Complex(0, kSqrtHalf)));
    PostSelectionOutcome sel = post_select(mix, {{"A"}});
    EXPECT_NEAR(sel.probability, 1.0, 1e-13);
}

TEST(PostSelectTest, ZeroProbabilityOutcome) {
    ModeRegistry reg({"A", "B"});
    FockState s = product_state({mode_h("A"), mode_v("A")}, reg);  // both photons in A
    PostSelectionOutcome sel = post_select(s, {{"A", "B"}});
    EXPECT_EQ(sel.probability, 0.0);
    EXPECT_TRUE(sel.state.is_zero());
}

TEST(PostSelectTest, UnknownLabelThrows) {
    ModeRegistry reg({"A"});
    EXPECT_THROW(post_select(vacuum_state(reg), {{"Q"}}), std::invalid_argument);
}

TEST(PostSelectPropertyTest, ProbabilityRecountAndFilterSoundness) {
    std::mt19937 gen(tu::kSeed + 15);
    ModeRegistry reg({"A", "B", "C"});
    const PostSelectionRule rule{{"A", "C"}};
    for (int trial = 0; trial < 20; ++trial) {
        FockState s = tu::random_state(reg, 3, 12, gen);
        PostSelectionOutcome sel = post_select(s, rule);
        double recount = 0.0;
        for (const auto& [occ, amp] : s.terms()) {
            const bool keep = occ.counts[0] + occ.counts[1] == 1 &&  // A
                              occ.counts[4] + occ.counts[5] == 1;    // C
            if (keep) recount += std::norm(amp);
            // every surviving term obeys the rule
            if (!keep) EXPECT_EQ(sel.state.amplitude(occ), Complex(0.0, 0.0));
        }
        EXPECT_NEAR(sel.probability, recount, 1e-12);
        if (sel.probability > 0.0) EXPECT_NEAR(norm_squared(sel.state), 1.0, 1e-12);
    }
}

TEST(PermanentTest, SmallCases) {
    Eigen::MatrixXcd empty(0, 0);
    EXPECT_EQ(permanent(empty), Complex(1.0, 0.0));
    Eigen::MatrixXcd one(1, 1);
    one << Complex(2.0, -1.0);
    EXPECT_EQ(permanent(one), Complex(2.0, -1.0));
    Eigen::MatrixXcd two(2, 2);
    two << 1.0, 2.0, 3.0, 4.0;
    // ad + bc = 4 + 6
    EXPECT_NEAR(std::abs(permanent(two) - Complex(10.0, 0.0)), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(permanent(Eigen::MatrixXcd::Identity(5, 5)) - Complex(1.0, 0.0)), 0.0,
                1e-12);
    // all-ones n x n permanent is n!
    EXPECT_NEAR(std::abs(permanent(Eigen::MatrixXcd::Ones(6, 6)) - Complex(720.0, 0.0)), 0.0,
                1e-9);
}

TEST(PermanentTest, RefusesBadShapes) {
    EXPECT_THROW(permanent(Eigen::MatrixXcd::Zero(2, 3)), std::invalid_argument);
    EXPECT_THROW(permanent(Eigen::MatrixXcd::Zero(21, 21)), std::invalid_argument);
}

TEST(PermanentTest, MatchesPermutationSumOracle) {
    std::mt19937 gen(tu::kSeed + 16);
    std::normal_distribution<double> n01;
    for (int n = 1; n <= 6; ++n) {
        for (int trial = 0; trial < 8; ++trial) {
            Eigen::MatrixXcd m(n, n);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) m(i, j) = Complex(n01(gen), n01(gen));
            }
            const Complex fast = permanent(m);
            const Complex slow = tu::naive_permanent(m);
            EXPECT_LT(std::abs(fast - slow), 1e-10 * std::max(1.0, std::abs(slow)));
            // transposition invariance
            EXPECT_LT(std::abs(permanent(m.transpose()) - fast),
                      1e-10 * std::max(1.0, std::abs(fast)));
        }
    }
}

TEST(TransitionAmplitudeTest, SinglePhotonIsTheMatrixEntry) {
    ModeRegistry reg({"A", "B"});
    std::mt19937 gen(tu::kSeed + 17);
    ModeUnitary u = random_mode_unitary(reg, gen);
    Occupation in = occupation_of(reg, {{mode_h("A"), 1}});
    Occupation out = occupation_of(reg, {{mode_v("B"), 1}});
    EXPECT_LT(std::abs(transition_amplitude_permanent(u, in, out) - u.matrix(3, 0)), 1e-14);
}

TEST(TransitionAmplitudeTest, ValidatesShapes) {
    ModeRegistry reg({"A"});
    ModeUnitary u = identity_unitary(reg);
    EXPECT_THROW(transition_amplitude_permanent(u, Occupation{{1}}, Occupation{{1, 0}}),
                 std::invalid_argument);
    EXPECT_THROW(transition_amplitude_permanent(u, Occupation{{1, 0}}, Occupation{{1, 1}}),
                 std::invalid_argument);
}

// The two amplitude routes -- multinomial expansion and permanents -- agree
// on every output occupation. The acceptance gate runs the full-size version
// of this check; this is the fast everyday copy.
TEST(OracleTest, ApplyUnitaryMatchesPermanentAmplitudes) {
    std::mt19937 gen(tu::kSeed + 18);
    const std::vector<std::vector<std::string>> registries = {
        {"A"}, {"A", "B"}, {"A", "B", "C"}, {"A", "B", "C", "D"}};
    int instances = 0;
    for (const auto& labels : registries) {
        ModeRegistry reg(labels);
        const auto all_in = tu::enumerate_occupations(reg.num_modes(), 2);
        for (int trial = 0; trial < 10; ++trial) {
            ModeUnitary u = random_mode_unitary(reg, gen);
            const Occupation& in = all_in[gen() % all_in.size()];
            FockState evolved = apply_unitary(FockState(reg, {{in, Complex(1.0, 0.0)}}), u);
            for (const Occupation& out : tu::enumerate_occupations(reg.num_modes(), in.total())) {
                const Complex direct = evolved.amplitude(out);
                const Complex via_perm = transition_amplitude_permanent(u, in, out);
                ASSERT_LT(std::abs(direct - via_perm), 1e-10);
            }
            ++instances;
        }
    }
    EXPECT_EQ(instances, 40);
}

}  // namespace
