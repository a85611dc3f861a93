#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <sstream>

#include "helpers.hpp"
#include "washrec/ersknn.hpp"
#include "washrec/rng.hpp"

using namespace washrec;

namespace {

struct Toy {
    Matrix X;
    std::vector<int> y;
};

Toy random_points(std::size_t n, std::size_t d, std::uint64_t seed, int classes = 3) {
    Toy t;
    Rng rng(seed);
    t.X = Matrix(n, d);
    for (auto& v : t.X.data()) v = rng.gaussian();
    for (std::size_t i = 0; i < n; ++i) t.y.push_back(static_cast<int>(rng.below(classes)));
    // avoid accidentally single-class labels on tiny draws
    if (n >= 2) {
        t.y[0] = 0;
        t.y[1] = 1;
    }
    return t;
}

}  // namespace

TEST_CASE("single learner with full subspace equals brute-force KNN") {
    const Toy t = random_points(200, 6, 77);
    ErsKnnParams params;
    params.n_learners = 1;
    params.subspace_dim = 6;
    params.k_neighbors = 1;
    const EnsembleModel model = train_ersknn(t.X, t.y, params);

    Rng rng(5);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> q(6);
        for (auto& v : q) v = rng.gaussian();
        REQUIRE(model.predict(q) == testutil::brute_knn(t.X, t.y, q, 1));
    }
}

TEST_CASE("ensemble equivalence also holds for k = 3") {
    const Toy t = random_points(150, 4, 11);
    ErsKnnParams params;
    params.n_learners = 1;
    params.subspace_dim = 4;
    params.k_neighbors = 3;
    const EnsembleModel model = train_ersknn(t.X, t.y, params);
    Rng rng(6);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> q(4);
        for (auto& v : q) v = rng.gaussian();
        REQUIRE(model.predict(q) == testutil::brute_knn(t.X, t.y, q, 3));
    }
}

TEST_CASE("every learner draws subspace_dim distinct indices") {
    const Toy t = random_points(40, 54, 3);
    ErsKnnParams params;
    params.n_learners = 30;
    params.subspace_dim = 27;
    const EnsembleModel model = train_ersknn(t.X, t.y, params);
    REQUIRE(model.learners.size() == 30);
    for (const auto& l : model.learners) {
        const std::set<std::size_t> distinct(l.feature_idx.begin(), l.feature_idx.end());
        CHECK(distinct.size() == 27);
        for (std::size_t f : l.feature_idx) CHECK(f < 54);
    }
}

TEST_CASE("subspace draws are deterministic per seed") {
    const Toy t = random_points(40, 10, 3);
    ErsKnnParams params;
    params.n_learners = 8;
    params.subspace_dim = 4;
    params.seed = 42;
    const EnsembleModel a = train_ersknn(t.X, t.y, params);
    const EnsembleModel b = train_ersknn(t.X, t.y, params);
    for (std::size_t l = 0; l < a.learners.size(); ++l)
        CHECK(a.learners[l].feature_idx == b.learners[l].feature_idx);

    params.seed = 43;
    const EnsembleModel c = train_ersknn(t.X, t.y, params);
    bool any_difference = false;
    for (std::size_t l = 0; l < a.learners.size(); ++l)
        if (a.learners[l].feature_idx != c.learners[l].feature_idx) any_difference = true;
    CHECK(any_difference);
}

TEST_CASE("training validates parameters") {
    const Toy t = random_points(20, 5, 1);
    ErsKnnParams params;
    params.subspace_dim = 9;
    CHECK_THROWS_AS(train_ersknn(t.X, t.y, params), SubspaceTooLarge);

    std::vector<int> one_class(20, 0);
    CHECK_THROWS_AS(train_ersknn(t.X, one_class, {}), SingleClass);
}

TEST_CASE("a query equal to a training point returns that point's label") {
    const Toy t = random_points(60, 8, 19);
    ErsKnnParams params;
    params.n_learners = 15;
    params.k_neighbors = 1;
    const EnsembleModel model = train_ersknn(t.X, t.y, params);
    for (std::size_t i = 0; i < 20; ++i) {
        const auto row = t.X.row(i);
        CHECK(model.predict(row) == t.y[i]);
    }
}

TEST_CASE("majority vote over learners: A,A,B gives A") {
    // three single-point learners: two vote label 2, one votes label 1
    EnsembleModel model;
    model.dims = 1;
    model.subspace_dim = 1;
    model.k_neighbors = 1;
    model.train_labels = {2, 1};
    model.class_ids = {1, 2};
    model.class_names = {"one", "two"};
    // learner data holds both rows; first learner biased toward row 0 by
    // zero distance is impossible here, so pin votes via disjoint features
    KnnLearner l;
    l.feature_idx = {0};
    l.data = Matrix(2, 1);
    l.data(0, 0) = 0.0;  // label 2
    l.data(1, 0) = 10.0;  // label 1
    model.learners = {l, l, l};
    model.learners[2].data(0, 0) = 100.0;  // third learner now nearest to label 1

    CHECK(model.predict(std::vector<double>{0.0}) == 2);
}

TEST_CASE("vote ties resolve to the lowest label id") {
    EnsembleModel model;
    model.dims = 1;
    model.subspace_dim = 1;
    model.k_neighbors = 1;
    model.train_labels = {3, 1};
    model.class_ids = {1, 3};
    model.class_names = {"one", "three"};
    KnnLearner near_three, near_one;
    near_three.feature_idx = {0};
    near_three.data = Matrix(2, 1);
    near_three.data(0, 0) = 0.0;
    near_three.data(1, 0) = 10.0;
    near_one = near_three;
    near_one.data(0, 0) = 100.0;
    model.learners = {near_three, near_one};  // one vote each
    CHECK(model.predict(std::vector<double>{0.0}) == 1);
}

TEST_CASE("neighbor distance ties break toward the lower training index") {
    Matrix X(2, 1);
    X(0, 0) = 1.0;
    X(1, 0) = -1.0;  // equidistant from 0
    const std::vector<int> y{5, 2};
    ErsKnnParams params;
    params.n_learners = 1;
    params.subspace_dim = 1;
    const EnsembleModel model = train_ersknn(X, y, params);
    CHECK(model.predict(std::vector<double>{0.0}) == 5);
}

TEST_CASE("predictions are invariant under training permutation on tie-free data") {
    const Toy t = random_points(80, 5, 23);
    ErsKnnParams params;
    params.n_learners = 1;
    params.subspace_dim = 5;
    const EnsembleModel a = train_ersknn(t.X, t.y, params);

    std::vector<std::size_t> perm(t.X.rows());
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(2);
    rng.shuffle(perm);
    Matrix Xp(t.X.rows(), t.X.cols());
    std::vector<int> yp;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        for (std::size_t c = 0; c < t.X.cols(); ++c) Xp(i, c) = t.X(perm[i], c);
        yp.push_back(t.y[perm[i]]);
    }
    const EnsembleModel b = train_ersknn(Xp, yp, params);

    Rng qrng(3);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> q(5);
        for (auto& v : q) v = qrng.gaussian();
        REQUIRE(a.predict(q) == b.predict(q));
    }
}

TEST_CASE("predict validates dimensions") {
    const Toy t = random_points(20, 5, 1);
    const EnsembleModel model = train_ersknn(t.X, t.y, {});
    CHECK_THROWS_AS(model.predict(std::vector<double>{1.0}), DimensionMismatch);
}

TEST_CASE("ersknn round-trips through its text serialization bit-exactly") {
    const Toy t = random_points(50, 7, 13);
    ErsKnnParams params;
    params.n_learners = 5;
    params.subspace_dim = 3;
    params.k_neighbors = 3;
    params.seed = 77;
    const Standardizer std_ = Standardizer::fit(t.X);
    const EnsembleModel model = train_ersknn(t.X, t.y, params, {}, std_);

    std::ostringstream out;
    save_ersknn(model, out);
    std::istringstream in(out.str());
    const EnsembleModel back = load_ersknn(in);

    REQUIRE(back.learners.size() == model.learners.size());
    Rng rng(55);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> q(7);
        for (auto& v : q) v = rng.gaussian();
        REQUIRE(back.predict(q) == model.predict(q));
    }
    std::ostringstream out2;
    save_ersknn(back, out2);
    CHECK(out.str() == out2.str());
}
