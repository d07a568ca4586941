#include <gtest/gtest.h>

#include <cmath>

#include "probekit/features.hpp"
#include "test_support.hpp"

using namespace probekit;

namespace {

/// Independent smooth-idf + L2 oracle for one document against a fitted
/// vocabulary: counts terms by direct string comparison.
std::vector<double> tfidf_oracle(const std::vector<std::string>& vocab, const std::vector<std::vector<std::string>>& docs,
                                 const std::vector<std::string>& query) {
    std::vector<double> row(vocab.size(), 0.0);
    const double n = static_cast<double>(docs.size());
    for (std::size_t c = 0; c < vocab.size(); ++c) {
        double df = 0.0;
        for (const auto& d : docs) df += std::count(d.begin(), d.end(), vocab[c]) > 0 ? 1.0 : 0.0;
        const double tf = static_cast<double>(std::count(query.begin(), query.end(), vocab[c]));
        row[c] = tf * (std::log((1.0 + n) / (1.0 + df)) + 1.0);
    }
    double norm = 0.0;
    for (double v : row) norm += v * v;
    norm = std::sqrt(norm);
    if (norm > 0.0) {
        for (double& v : row) v /= norm;
    }
    return row;
}

EmbeddingStore token_store(const std::vector<std::vector<std::vector<float>>>& sentences) {
    EmbeddingStore s;
    s.model_id = "toks";
    s.num_layers = 1;
    s.dim = static_cast<std::uint32_t>(sentences[0][0].size());
    s.n_sentences = static_cast<std::uint32_t>(sentences.size());
    TokenTensor t;
    t.dim = s.dim;
    for (const auto& sent : sentences) {
        std::vector<float> flat;
        for (const auto& tok : sent) flat.insert(flat.end(), tok.begin(), tok.end());
        t.push_sentence(flat);
    }
    s.tokens.push_back(t);
    return s;
}

}  // namespace

TEST(Tokenize, LowercasesSplitsAndDropsShortTokens) {
    EXPECT_EQ(tokenize("The cat's HAT, a 42-x!"), (std::vector<std::string>{"the", "cat", "hat", "42"}));
    EXPECT_EQ(tokenize("a b", 1), (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(tokenize("perché è così"), (std::vector<std::string>{"perché", "è", "così"}));
}

TEST(TfidfFit, CountsDocumentFrequency) {
    const auto m = tfidf_fit({"a b", "a c"}, {std::nullopt, 1});
    EXPECT_EQ(m.vocabulary, (std::vector<std::string>{"a", "b", "c"}));
    EXPECT_EQ(m.document_frequency, (std::vector<std::size_t>{2, 1, 1}));
    EXPECT_EQ(m.n_documents, 2u);
}

TEST(TfidfFit, MaxFeaturesKeepsMostFrequentTerms) {
    std::vector<std::string> corpus;
    for (int i = 0; i < 10; ++i) corpus.push_back(i < 5 ? "the cat" : "the");
    corpus.push_back("sat");
    const auto m = tfidf_fit(corpus, {2, 2});
    EXPECT_EQ(m.vocabulary, (std::vector<std::string>{"cat", "the"}));
}

TEST(TfidfFit, MaxFeaturesTiesAreAlphabetical) {
    const auto m = tfidf_fit({"zeta alpha mid", "zeta alpha mid"}, {2, 2});
    EXPECT_EQ(m.vocabulary, (std::vector<std::string>{"alpha", "mid"}));
}

TEST(TfidfFit, RejectsEmptyCorpusAndCorpusWithoutTokens) {
    EXPECT_THROW(tfidf_fit({}), ValidationError);
    EXPECT_THROW(tfidf_fit({"a b c", "! ?"}), ValidationError);
}

TEST(TfidfTransform, MatchesHandComputedOracle) {
    const auto m = tfidf_fit({"a b", "a c"}, {std::nullopt, 1});
    const auto fm = tfidf_transform(m, {"a b"});
    // idf(a) = 1, idf(b) = ln(3/2) + 1, then L2 normalized.
    const double idf_b = std::log(1.5) + 1.0;
    const double norm = std::sqrt(1.0 + idf_b * idf_b);
    EXPECT_NEAR(fm.values(0, 0), 1.0 / norm, 1e-12);
    EXPECT_NEAR(fm.values(0, 1), idf_b / norm, 1e-12);
    EXPECT_NEAR(fm.values(0, 0), 0.579739, 1e-6);
    EXPECT_NEAR(fm.values(0, 1), 0.814802, 1e-6);
    EXPECT_EQ(fm.values(0, 2), 0.0);
}

TEST(TfidfTransform, EmptyAndOutOfVocabularyGiveZeroRows) {
    const auto m = tfidf_fit({"aa bb", "aa cc"});
    const auto fm = tfidf_transform(m, {"", "zz zz zz"});
    for (double v : fm.values.data()) EXPECT_EQ(v, 0.0);
}

TEST(TfidfTransform, PropertiesAgainstOracle) {
    const std::vector<std::string> words{"alpha", "beta", "gamma", "delta", "eps", "zeta", "eta", "theta"};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        auto sentence = [&] {
            std::string s;
            const auto len = rng.below(6);
            for (std::size_t i = 0; i < len; ++i) s += words[rng.below(words.size())] + " ";
            return s;
        };
        std::vector<std::string> corpus;
        for (int i = 0; i < 12; ++i) corpus.push_back(sentence() + "alpha");
        std::vector<std::string> batch;
        for (int i = 0; i < 8; ++i) batch.push_back(sentence());

        const auto model = tfidf_fit(corpus);
        const auto fm = tfidf_transform(model, batch);
        std::vector<std::vector<std::string>> docs;
        for (const auto& d : corpus) docs.push_back(tokenize(d));
        for (std::size_t i = 0; i < batch.size(); ++i) {
            const auto row = fm.values.row(i);
            const double norm = l2_norm(row);
            EXPECT_TRUE(norm == 0.0 || std::abs(norm - 1.0) < 1e-12);
            const auto expected = tfidf_oracle(model.vocabulary, docs, tokenize(batch[i]));
            for (std::size_t c = 0; c < row.size(); ++c) ASSERT_NEAR(row[c], expected[c], 1e-12);
        }

        // Independent of batch order.
        std::vector<std::string> reversed(batch.rbegin(), batch.rend());
        const auto fr = tfidf_transform(model, reversed);
        for (std::size_t i = 0; i < batch.size(); ++i) {
            const auto a = fm.values.row(i);
            const auto b = fr.values.row(batch.size() - 1 - i);
            EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
        }

        // A cap at or above the vocabulary size changes nothing.
        const auto capped = tfidf_fit(corpus, {model.size() + seed, 2});
        EXPECT_EQ(tfidf_transform(capped, batch).values, fm.values);
    }
}

TEST(AggregateTokens, MeanAndHadamardProduct) {
    const auto store = token_store({{{1, 2}, {3, 4}}, {{5, 6}}});
    const auto mean = aggregate_tokens(store, 0, AggregationMode::mean);
    EXPECT_DOUBLE_EQ(mean.values(0, 0), 2.0);
    EXPECT_DOUBLE_EQ(mean.values(0, 1), 3.0);
    const auto prod = aggregate_tokens(store, 0, AggregationMode::product);
    EXPECT_DOUBLE_EQ(prod.values(0, 0), 3.0);
    EXPECT_DOUBLE_EQ(prod.values(0, 1), 8.0);
    // Single-token sentence: both modes return the token.
    EXPECT_DOUBLE_EQ(mean.values(1, 0), 5.0);
    EXPECT_DOUBLE_EQ(prod.values(1, 1), 6.0);
}

TEST(AggregateTokens, ErrorsOnMissingKindOrLayer) {
    const auto store = token_store({{{1, 2}}});
    EXPECT_THROW(aggregate_tokens(store, 1, AggregationMode::mean), ValidationError);
    auto no_tokens = fixtures::store_from_matrices({Matrix(1, 2, 1.0)});
    EXPECT_THROW(aggregate_tokens(no_tokens, 0, AggregationMode::mean), ValidationError);
}

TEST(AggregateTokens, HadamardUnderflowIsFlagged) {
    std::vector<std::vector<float>> many(400, std::vector<float>{1e-3f, 0.05f});
    const auto store = token_store({many, {{2.0f, 3.0f}}});
    const auto prod = aggregate_tokens(store, 0, AggregationMode::product);
    EXPECT_EQ(prod.values(0, 0), 0.0);
    EXPECT_EQ(prod.values(0, 1), 0.0);
    EXPECT_EQ(prod.underflow_rows, (std::vector<std::size_t>{0}));
}

TEST(AggregateTokens, PermutationAndConstantTokenProperties) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const std::size_t n_tok = 1 + rng.below(6);
        std::vector<std::vector<float>> toks;
        for (std::size_t t = 0; t < n_tok; ++t) {
            toks.push_back({static_cast<float>(rng.normal()), static_cast<float>(rng.normal()), static_cast<float>(rng.normal())});
        }
        auto shuffled = toks;
        rng.shuffle(std::span<std::vector<float>>(shuffled));
        const auto a = token_store({toks});
        const auto b = token_store({shuffled});
        for (auto mode : {AggregationMode::mean, AggregationMode::product}) {
            const auto ra = aggregate_tokens(a, 0, mode).values;
            const auto rb = aggregate_tokens(b, 0, mode).values;
            for (std::size_t d = 0; d < 3; ++d) EXPECT_NEAR(ra(0, d), rb(0, d), 1e-12 * (1.0 + std::abs(ra(0, d))));
        }
        std::vector<std::vector<float>> constant(n_tok, toks[0]);
        const auto mean = aggregate_tokens(token_store({constant}), 0, AggregationMode::mean).values;
        for (std::size_t d = 0; d < 3; ++d) EXPECT_EQ(mean(0, d), static_cast<double>(toks[0][d]));
    }
}

TEST(AggregateTokens, MaskExcludesSpecialTokens) {
    auto store = token_store({{{100, 100}, {1, 2}, {3, 4}, {-100, 7}}});
    TokenMask mask;
    mask.keep = {0, 1, 1, 0};
    mask.offsets.push_back(4);
    store.token_masks.push_back(mask);
    const auto mean = aggregate_tokens(store, 0, AggregationMode::mean);
    EXPECT_DOUBLE_EQ(mean.values(0, 0), 2.0);
    EXPECT_DOUBLE_EQ(mean.values(0, 1), 3.0);
}

TEST(SelectRepresentation, ResolvesEachKind) {
    Matrix l0(3, 2, 0.5);  // identical rows, as for CLS before attention
    Matrix l1(3, 2);
    for (std::size_t i = 0; i < 3; ++i) l1(i, 0) = static_cast<double>(i);
    auto store = fixtures::store_from_matrices({l0, l1});
    store.pooled = to_dense32(Matrix(3, 2, 9.0));

    const auto cls0 = select_representation(store, {RepresentationKind::cls, 0});
    for (std::size_t i = 1; i < 3; ++i) {
        EXPECT_TRUE(std::equal(cls0.values.row(0).begin(), cls0.values.row(0).end(), cls0.values.row(i).begin()));
    }
    EXPECT_EQ(select_representation(store, {RepresentationKind::cls, 1}).values, l1);
    EXPECT_EQ(select_representation(store, {RepresentationKind::pooled, 0}).values,
              select_representation(store, {RepresentationKind::pooled, 1}).values);
    EXPECT_THROW(select_representation(store, {RepresentationKind::tokens_mean, 0}), ValidationError);
    EXPECT_THROW(select_representation(store, {RepresentationKind::cls, 2}), ValidationError);
}

TEST(SelectRepresentation, TokenKindsDelegateToAggregation) {
    const auto store = token_store({{{1, 2}, {3, 4}}, {{5, 6}, {7, 8}, {9, 10}}});
    EXPECT_EQ(select_representation(store, {RepresentationKind::tokens_mean, 0}).values,
              aggregate_tokens(store, 0, AggregationMode::mean).values);
    EXPECT_EQ(select_representation(store, {RepresentationKind::tokens_product, 0}).values,
              aggregate_tokens(store, 0, AggregationMode::product).values);
    EXPECT_THROW(select_representation(store, {RepresentationKind::cls, 0}), ValidationError);
}

TEST(RepresentationKind, ParsesCliNames) {
    EXPECT_EQ(parse_representation_kind("cls"), RepresentationKind::cls);
    EXPECT_EQ(parse_representation_kind("mean"), RepresentationKind::tokens_mean);
    EXPECT_EQ(parse_representation_kind("product"), RepresentationKind::tokens_product);
    EXPECT_EQ(parse_representation_kind("pooled"), RepresentationKind::pooled);
    EXPECT_THROW(parse_representation_kind("max"), ValidationError);
}
