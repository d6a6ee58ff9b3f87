// Copyright (c) 2026 The FullConv TTS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "cli.h"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "fullconv/augment.h"
#include "fullconv/checkpoint.h"
#include "fullconv/config.h"
#include "fullconv/corpus.h"
#include "fullconv/error.h"
#include "fullconv/synth.h"
#include "fullconv/trainer.h"

namespace fullconv {
namespace {

namespace fs = std::filesystem;

// Name of the config file preprocess leaves next to the prepared corpus.
constexpr const char* kPreparedConfig = "run.cfg";

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kData, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
}

RunConfig config_for(const std::string& config_path, const fs::path& data_dir) {
  if (!config_path.empty()) return load_run_config(config_path);
  if (!data_dir.empty() && fs::exists(data_dir / kPreparedConfig))
    return load_run_config(data_dir / kPreparedConfig);
  return {};
}

struct PreprocessArgs {
  std::string metadata, wav_dir, out, config;
};

int run_preprocess(const PreprocessArgs& a, std::ostream& out) {
  RunConfig rc = config_for(a.config, {});
  fs::create_directories(a.out);
  const Corpus corpus = load_corpus(a.metadata, a.wav_dir, a.out, rc.features);
  rc.vocab = corpus.vocab.serialize();
  write_text_file(fs::path(a.out) / kPreparedConfig, render_run_config(rc));
  out << "prepared " << corpus.utterances.size() << " utterances, " << corpus.vocab.size()
      << " symbols, into " << a.out << "\n";
  return kExitOk;
}

struct TrainArgs {
  std::string data, out, config, resume;
  std::optional<std::uint64_t> seed;
};

int run_train(const TrainArgs& a, Stage stage, std::ostream& out) {
  RunConfig rc = config_for(a.config, a.data);
  if (a.seed) rc.trainer.seed = *a.seed;
  const Corpus corpus = load_prepared(a.data);
  const std::string vocab = corpus.vocab.serialize();
  if (!rc.vocab.empty() && rc.vocab != vocab)
    fail(ErrorKind::kData, "config vocabulary does not match the corpus in " + a.data);
  rc.vocab = vocab;
  rc.validate();

  std::optional<Checkpoint> resume;
  if (!a.resume.empty()) {
    resume = load_checkpoint(a.resume);
    const RunConfig prev = parse_run_config(resume->config_echo);
    if (!prev.vocab.empty() && prev.vocab != vocab)
      fail(ErrorKind::kData, "checkpoint " + a.resume + " was trained on a different vocabulary");
  }
  fs::create_directories(a.out);

  const auto interval = rc.trainer.log_interval;
  const LoopObserver log = [&](const LoopEvent& e) {
    if (interval == 0 || e.iteration % interval != 0) return true;
    out << stage_name(e.stage) << " iter " << e.iteration << std::fixed << std::setprecision(5);
    if (e.stage == Stage::kText2Mel) {
      out << " total " << e.t2m.total << " l1 " << e.t2m.l1 << " bd " << e.t2m.l_hiera
          << " attn " << e.t2m.l_attn;
    } else {
      out << " l1 " << e.ssrn.l1 << " bd " << e.ssrn.l_hiera;
    }
    out << std::defaultfloat << "\n" << std::flush;
    return true;
  };
  const Checkpoint last = train_loop(corpus, network_config(rc), rc.trainer, stage, a.out,
                                     render_run_config(rc), resume ? &*resume : nullptr, log);
  out << "finished at iteration " << last.iteration << ", checkpoint "
      << (fs::path(a.out) / checkpoint_file_name(stage, last.iteration)).string() << "\n";
  return kExitOk;
}

struct SynthArgs {
  std::string text, text_file, t2m, ssrn, out;
  bool emit = false;
  bool no_forcing = false;
};

int run_synth(const SynthArgs& a, std::ostream& out) {
  std::string text = a.text_file.empty() ? a.text : read_text_file(a.text_file);
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  if (text.empty()) fail(ErrorKind::kData, "nothing to synthesize");

  const Synthesizer synth = Synthesizer::load(load_checkpoint(a.t2m), load_checkpoint(a.ssrn));
  SynthesisConfig syn = synth.config.synth;
  if (a.no_forcing) syn.forcing_enabled = false;
  const SynthesisResult r = synth.synthesize(text, syn);

  const fs::path wav(a.out);
  if (wav.has_parent_path()) fs::create_directories(wav.parent_path());
  write_wav(wav, r.wave);
  if (a.emit) {
    fs::path stem = wav;
    stem.replace_extension();
    write_mspec(stem.string() + ".mel.mspec", r.decode.mel);
    write_mspec(stem.string() + ".linear.mspec", r.linear);
    write_alignment_pgm(stem.string() + ".align.pgm", r.decode);
  }
  out << "wrote " << r.wave.samples.size() << " samples (" << r.decode.mel.frames
      << " coarse frames" << (r.decode.stopped ? "" : ", frame cap reached") << ") to " << a.out
      << "\n";
  return kExitOk;
}

struct PreviewArgs {
  std::string in, out, config;
  std::uint64_t seed = 0;
};

int run_augment_preview(const PreviewArgs& a, std::ostream& out) {
  const RunConfig rc = config_for(a.config, {});
  const Spectrogram spec = read_mspec(a.in);
  rc.trainer.augment.validate(spec.bins);
  std::mt19937_64 rng(a.seed);
  write_mspec(a.out, augment_utterance(spec, rc.trainer.augment, rng));
  out << "wrote " << a.out << "\n";
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fully convolutional text-to-speech: preprocessing, training and synthesis",
               "fullconv-tts"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  PreprocessArgs pre;
  auto* pre_cmd = app.add_subcommand("preprocess", "Extract features from a wav corpus");
  pre_cmd->add_option("--metadata", pre.metadata, "id|text lines")->required()->check(CLI::ExistingFile);
  pre_cmd->add_option("--wav-dir", pre.wav_dir, "directory of <id>.wav")->required()->check(CLI::ExistingDirectory);
  pre_cmd->add_option("--out", pre.out, "prepared corpus directory")->required();
  pre_cmd->add_option("--config", pre.config, "run config file")->check(CLI::ExistingFile);

  TrainArgs t2m, ssrn;
  auto add_train = [&](const char* name, const char* help, TrainArgs& t) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("--data", t.data, "prepared corpus directory")->required()->check(CLI::ExistingDirectory);
    cmd->add_option("--out", t.out, "checkpoint directory")->required();
    cmd->add_option("--config", t.config, "run config file")->check(CLI::ExistingFile);
    cmd->add_option("--resume", t.resume, "checkpoint to continue from")->check(CLI::ExistingFile);
    cmd->add_option("--seed", t.seed, "trainer seed");
    return cmd;
  };
  auto* t2m_cmd = add_train("train-t2m", "Train Text2Mel", t2m);
  auto* ssrn_cmd = add_train("train-ssrn", "Train the spectrogram super-resolution network", ssrn);

  SynthArgs syn;
  auto* syn_cmd = app.add_subcommand("synth", "Synthesize a wav file from text");
  auto* text_opt = syn_cmd->add_option("--text", syn.text, "text to speak");
  auto* file_opt = syn_cmd->add_option("--text-file", syn.text_file, "UTF-8 file with the text")
                       ->check(CLI::ExistingFile);
  text_opt->excludes(file_opt);
  syn_cmd->add_option("--t2m", syn.t2m, "Text2Mel checkpoint")->required()->check(CLI::ExistingFile);
  syn_cmd->add_option("--ssrn", syn.ssrn, "SSRN checkpoint")->required()->check(CLI::ExistingFile);
  syn_cmd->add_option("--out", syn.out, "output wav")->required();
  syn_cmd->add_flag("--emit-spectrograms", syn.emit,
                    "also write <out>.mel.mspec, <out>.linear.mspec and <out>.align.pgm");
  syn_cmd->add_flag("--no-forcing", syn.no_forcing, "disable diagonal attention forcing");

  PreviewArgs prev;
  auto* prev_cmd = app.add_subcommand("augment-preview", "Apply one random augmentation to a mel file");
  prev_cmd->add_option("--in", prev.in, "input mspec")->required()->check(CLI::ExistingFile);
  prev_cmd->add_option("--out", prev.out, "output mspec")->required();
  prev_cmd->add_option("--seed", prev.seed, "random seed")->required();
  prev_cmd->add_option("--config", prev.config, "run config file")->check(CLI::ExistingFile);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("fullconv-tts");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (syn_cmd->parsed() && text_opt->count() == 0 && file_opt->count() == 0)
      throw CLI::RequiredError("--text or --text-file");
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (pre_cmd->parsed()) return run_preprocess(pre, out);
    if (t2m_cmd->parsed()) return run_train(t2m, Stage::kText2Mel, out);
    if (ssrn_cmd->parsed()) return run_train(ssrn, Stage::kSsrn, out);
    if (syn_cmd->parsed()) return run_synth(syn, out);
    if (prev_cmd->parsed()) return run_augment_preview(prev, out);
  } catch (const Error& e) {
    err << "error (" << error_kind_name(e.kind()) << "): " << e.what() << "\n";
    return e.kind() == ErrorKind::kNumeric ? kExitNumeric : kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace fullconv
