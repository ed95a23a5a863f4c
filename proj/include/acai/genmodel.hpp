#pragma once

// Conditional GAN with an information-regularized semantic code. The
// generator consumes (z, c, one-hot y); the semantic code c is additionally
// injected as constant channels at every intermediate resolution. Q shares
// the discriminator trunk and reads its flattened features.

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "acai/batch.hpp"
#include "acai/common.hpp"
#include "acai/nn.hpp"
#include "acai/synthworld.hpp"

namespace acai::gan {

// ------------------------------------------------------------------ types ---

struct LatentCode {
    std::vector<double> z;
    std::vector<double> c;
    int y = 0;
};

struct GanTrainConfig {
    int d_z = 16;
    int k = 10;
    int image_size = 32;
    int n_classes = 4;
    std::vector<int> g_channels = {64, 32, 16, 16};  // at 4x4, 8x8, ... up to image_size
    std::vector<int> d_channels = {16, 32, 64};      // stride-2 stack down to 4x4
    int head_hidden = 64;
    int steps = 20000;
    int batch = 32;
    double lr_d = 2e-4;
    double lr_g = 2e-4;
    double adam_beta1 = 0.5;
    double info_weight = 1.0;
    uint64_t seed = 0;
    int checkpoint_interval = 0;  // 0: only the final checkpoint
    std::string checkpoint_dir;   // empty: no checkpoints written

    void validate() const;
    nlohmann::json to_json() const;
};

struct LatentBatch {
    nn::Mat<float> z;  // d_z x B
    nn::Mat<float> c;  // k x B
    std::vector<int> y;

    int batch() const { return static_cast<int>(y.size()); }
};

// -------------------------------------------------------------- generator ---

template <class T>
struct Generator {
    // architecture
    int d_z = 0, k = 0, n_classes = 0, image_size = 0;
    std::vector<int> channels;
    nn::Act hidden_act = nn::Act::LeakyRelu;
    std::vector<double> label_dist;  // training label distribution, for sampling

    // layers
    nn::Dense<T> fc;
    nn::Activation<T> fc_act;
    std::vector<nn::Upsample2x<T>> ups;
    std::vector<nn::Conv2d<T>> convs;
    std::vector<nn::Activation<T>> acts;
    nn::Conv2d<T> to_rgb;
    nn::SigmoidLayer<T> out_act;

    void configure(int d_z_, int k_, int n_classes_, int image_size_,
                   const std::vector<int>& channels_, uint64_t init_seed,
                   nn::Act act = nn::Act::LeakyRelu);

    // images as 3*H*W x B columns in [0,1]
    nn::Mat<T> forward(const LatentBatch& latents);
    void backward(const nn::Mat<T>& dimages);

    std::vector<nn::ParamRef<T>> params();
    nlohmann::json arch_json() const;

    int n_stages() const { return static_cast<int>(convs.size()); }
};

// ---------------------------------------------------------- discriminator ---

template <class T>
struct DiscQ {
    int k = 0, n_classes = 0, image_size = 0;
    std::vector<int> channels;
    int head_hidden = 64;
    nn::Act hidden_act = nn::Act::LeakyRelu;
    int feat_dim = 0;

    std::vector<nn::Conv2d<T>> convs;
    std::vector<nn::Activation<T>> acts;
    nn::Dense<T> d_fc1, d_fc2;  // realism head
    nn::Activation<T> d_act;
    nn::Dense<T> q_fc1, q_fc2;  // code head
    nn::Activation<T> q_act;

    // Trunk and realism head draw from one stream; the Q head has its own so
    // that its initialization never shifts D/G draws.
    void configure(int k_, int n_classes_, int image_size_, const std::vector<int>& channels_,
                   int head_hidden_, uint64_t trunk_seed, uint64_t q_seed,
                   nn::Act act = nn::Act::LeakyRelu);

    nn::Mat<T> forward_trunk(const nn::Mat<T>& images, const std::vector<int>& labels);
    nn::Mat<T> d_logits(const nn::Mat<T>& feat);  // 1 x B
    nn::Mat<T> q_means(const nn::Mat<T>& feat);   // k x B

    // Backpropagates through whichever heads received gradients, then the
    // trunk; returns d(images) (conditioning-channel gradients are dropped).
    nn::Mat<T> backward(const nn::Mat<T>* dlogits, const nn::Mat<T>* dqmeans);

    std::vector<nn::ParamRef<T>> trunk_and_d_params();
    std::vector<nn::ParamRef<T>> q_params();
    std::vector<nn::ParamRef<T>> params();
    nlohmann::json arch_json() const;
};

using GeneratorF = Generator<float>;
using DiscQF = DiscQ<float>;

// ---------------------------------------------------------------- history ---

struct GanHistoryRow {
    int step = 0;
    double d_loss = 0.0;
    double g_loss = 0.0;
    double info_loss = 0.0;
};

struct GanResult {
    GeneratorF generator;
    DiscQF discq;
    std::vector<GanHistoryRow> history;
};

// ------------------------------------------------------------- operations ---

// z and every c coordinate are standard normal; y follows label_dist.
// Stream draw order per sample: z coordinates, c coordinates, one uniform for
// the label. Oracles replaying a latent stream must follow that order.
LatentCode sample_latent_stream(std::mt19937_64& rng, int d_z, int k,
                                const std::vector<double>& label_dist);
LatentCode sample_latent(const GanTrainConfig& cfg, const std::vector<double>& label_dist,
                         uint64_t seed);

// Draws one uniform from the stream and overwrites c[i] with lo + u*(hi-lo).
LatentCode with_uniform_code(std::mt19937_64& rng, LatentCode latent, int i, double lo, double hi);

LatentBatch to_batch(const std::vector<LatentCode>& codes);

Image generate(const GeneratorF& G, const LatentCode& latent);
nn::Mat<float> generate_batch(GeneratorF& G, const LatentBatch& latents);

// Gaussian negative log-likelihood of c under Q's unit-variance posterior
// plus -log p(c) under the standard normal prior. The prior sum is constant
// with respect to every model parameter and is excluded from gradients.
double info_loss(const std::vector<double>& c, const std::vector<double>& q_mean);

LatentCode counterfactual_edit(const LatentCode& latent, int i, double c_new);

GanResult gan_train(const GanTrainConfig& cfg, const world::DatasetSplit& data);

struct AlignmentExtractor {
    std::string name;
    std::function<double(const Image&, const LatentCode&)> fn;
};

// Spearman rank correlation between each code coordinate and each extractor
// over n generated samples; rows index codes, columns extractors.
nn::Mat<double> factor_alignment_report(const GeneratorF& G,
                                        const std::vector<AlignmentExtractor>& extractors, int n,
                                        uint64_t seed);

void write_history_csv(const std::vector<GanHistoryRow>& history, const std::string& path);

}  // namespace acai::gan
