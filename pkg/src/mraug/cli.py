"""Command-line entry points for each pipeline stage.

Every stage reads and writes plain files under ``--out-dir`` so any stage's
output can be replaced by hand or by another tool::

    keywords.tsv        phrase<TAB>score
    candidates.tsv      pool id<TAB>utterance
    filtered.tsv        pool id<TAB>utterance
    filter_report.tsv   key<TAB>value
    augmented.txt       MR & utterance
    intrinsic.tsv       metric<TAB>value
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from contextlib import contextmanager

from . import keywords as kw
from .config import PipelineConfig, derive_seed, load_config
from .dataset import FewShotSplit, compute_stats, make_split
from .errors import ConfigError, StageError
from .metrics import corpus_bleu, corpus_err, intrinsic_report, write_report
from .mr import UtterancePair, iter_pairs, parse_mr, read_pairs, write_pairs
from .nlu import ExternalIntentModel, annotate, build_lexicon, train_intent_model
from .retrieval import CandidateSet, load_pool, read_candidates, retrieve, write_candidates
from .selftrain import external_factory, run_self_training, train_builtin_classifier

log = logging.getLogger("mraug")

KEYWORDS_FILE = "keywords.tsv"
CANDIDATES_FILE = "candidates.tsv"
FILTERED_FILE = "filtered.tsv"
REPORT_FILE = "filter_report.tsv"
AUGMENTED_FILE = "augmented.txt"
INTRINSIC_FILE = "intrinsic.tsv"


@contextmanager
def stage(name):
    try:
        yield
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc


def _out(cfg: PipelineConfig, name: str) -> str:
    os.makedirs(cfg.paths.out_dir, exist_ok=True)
    return os.path.join(cfg.paths.out_dir, name)


def _require(value, what):
    if not value:
        raise ConfigError(f"missing required setting: {what}")
    return value


def _load_in_domain(cfg) -> list[UtterancePair]:
    return read_pairs(_require(cfg.paths.in_domain, "paths.in_domain"))


def _load_pool(cfg):
    t = cfg.text
    if cfg.paths.index and os.path.exists(cfg.paths.index):
        return load_pool(cfg.paths.index)
    pool = load_pool(_require(cfg.paths.pool, "paths.pool"), min_len=t.min_len,
                     max_len=t.max_len, n_min=t.n_min, n_max=t.n_max)
    if cfg.paths.index:
        pool.save(cfg.paths.index)
    return pool


def _write_id_lines(path, pool, ids):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for uid in ids:
            f.write(f"{uid}\t{pool.sources[uid]}\n")


def _read_utterances(path) -> list[str]:
    with open(path, encoding="utf-8") as f:
        return [line.rstrip("\n").split("\t", 1)[-1] for line in f if line.strip()]


# -- stages ----------------------------------------------------------------


def cmd_extract_keywords(cfg: PipelineConfig, pool=None, pairs=None):
    with stage("extract-keywords"):
        pairs = pairs if pairs is not None else _load_in_domain(cfg)
        pool = pool if pool is not None else _load_pool(cfg)
        keywords = kw.extract_keywords(
            [p.utterance for p in pairs], pool, cfg.text.n_min, cfg.text.n_max,
            cfg.keywords.max_keywords, cfg.keywords.min_score,
        )
        kw.write_keywords(_out(cfg, KEYWORDS_FILE), keywords)
        print(f"keywords: {len(keywords)}")
        return keywords


def cmd_retrieve(cfg: PipelineConfig, pool=None, keywords=None):
    with stage("retrieve"):
        pool = pool if pool is not None else _load_pool(cfg)
        keywords = keywords if keywords is not None else kw.read_keywords(_out(cfg, KEYWORDS_FILE))
        candidates = retrieve(pool, keywords)
        write_candidates(_out(cfg, CANDIDATES_FILE), pool, candidates)
        print(f"candidates: {len(candidates)}")
        return candidates


def cmd_filter(cfg: PipelineConfig, pool=None, candidates: CandidateSet | None = None, pairs=None):
    with stage("filter"):
        pairs = pairs if pairs is not None else _load_in_domain(cfg)
        pool = pool if pool is not None else _load_pool(cfg)
        if candidates is None:
            candidates = read_candidates(_out(cfg, CANDIDATES_FILE))
        if cfg.filter.scorer_cmd:
            factory = external_factory(cfg.filter.scorer_cmd)
        else:
            factory = train_builtin_classifier
        fcfg = cfg.filter_config(derive_seed(cfg.seed, "filter"))
        filtered, report = run_self_training(
            [p.utterance for p in pairs], candidates, pool, factory, fcfg
        )
        _write_id_lines(_out(cfg, FILTERED_FILE), pool, report.kept_ids)
        report.write(_out(cfg, REPORT_FILE))
        print(f"filtered: {report.n_filtered} of {report.n_candidates} "
              f"({report.iterations_run} iterations, converged={report.converged})")
        return filtered, report


def cmd_annotate(cfg: PipelineConfig, filtered=None, pairs=None):
    with stage("annotate"):
        pairs = pairs if pairs is not None else _load_in_domain(cfg)
        if filtered is None:
            filtered = _read_utterances(_out(cfg, FILTERED_FILE))
        lexicon = build_lexicon(pairs)
        if cfg.nlu.intent_cmd:
            model = ExternalIntentModel(cfg.nlu.intent_cmd, pairs)
        else:
            model = train_intent_model(pairs)
        augmented = annotate(filtered, lexicon, model)
        write_pairs(_out(cfg, AUGMENTED_FILE), augmented)
        print(f"augmented pairs: {len(augmented)}")
        return augmented


def cmd_augment(cfg: PipelineConfig):
    """Keywords, retrieval, filtering and annotation in one run."""
    with stage("load"):
        pairs = _load_in_domain(cfg)
        pool = _load_pool(cfg)
    keywords = cmd_extract_keywords(cfg, pool, pairs)
    candidates = cmd_retrieve(cfg, pool, keywords)
    filtered, report = cmd_filter(cfg, pool, candidates, pairs)
    augmented = cmd_annotate(cfg, filtered, pairs)
    if cfg.paths.test:
        with stage("intrinsic"):
            test = read_pairs(cfg.paths.test)
            values = intrinsic_report(augmented, test, cfg.metrics.lm_order, cfg.metrics.lm_k)
            write_report(_out(cfg, INTRINSIC_FILE), values)
    return augmented, report


def cmd_split(cfg: PipelineConfig):
    with stage("split"):
        corpus = read_pairs(_require(cfg.paths.corpus, "paths.corpus"))
        split = make_split(corpus, cfg.split.k_groups, derive_seed(cfg.seed, "split"))
        write_pairs(_out(cfg, "train.txt"), split.train)
        write_pairs(_out(cfg, "test.txt"), split.test)
        compute_stats(split).write(_out(cfg, "stats.tsv"))
        print(f"train: {len(split.train)}  test: {len(split.test)}")
        return split


def cmd_stats(cfg: PipelineConfig, train_path=None, test_path=None):
    with stage("stats"):
        train = read_pairs(train_path or _out(cfg, "train.txt"))
        test = read_pairs(test_path or _out(cfg, "test.txt"))
        stats = compute_stats(FewShotSplit(train, test))
        stats.write(_out(cfg, "stats.tsv"))
        print("\n".join(stats.lines()))
        return stats


def _read_hyp(path):
    """Hypotheses as (MR or None, text); lines may be pairs or bare text."""
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            if " & " in line:
                mr_text, _, text = line.partition(" & ")
                try:
                    out.append((parse_mr(mr_text), text.strip()))
                    continue
                except SyntaxError:
                    pass
            out.append((None, line))
    return out


def cmd_evaluate(cfg: PipelineConfig, hyp=None, ref=None, aug=None, test=None):
    """BLEU/ERR of hypotheses against references, plus intrinsic metrics of an augmented set."""
    with stage("evaluate"):
        values = {}
        if hyp and ref:
            hyps = _read_hyp(hyp)
            refs = read_pairs(ref)
            if all(mr is not None for mr, _ in hyps):
                # references: every reference utterance sharing the hypothesis MR
                by_mr: dict = {}
                for p in refs:
                    by_mr.setdefault(p.mr, []).append(p.utterance)
                ref_sets = [by_mr.get(mr, []) for mr, _ in hyps]
                mrs = [mr for mr, _ in hyps]
            else:
                if len(hyps) != len(refs):
                    raise ValueError(f"{len(hyps)} hypotheses vs {len(refs)} references")
                ref_sets = [[p.utterance] for p in refs]
                mrs = [p.mr for p in refs]
            texts = [t for _, t in hyps]
            values["bleu"] = corpus_bleu(texts, ref_sets)
            values["err"] = corpus_err(mrs, texts, build_lexicon(refs))
        if aug and test:
            values.update(intrinsic_report(read_pairs(aug), read_pairs(test),
                                           cfg.metrics.lm_order, cfg.metrics.lm_k))
        if not values:
            raise ConfigError("evaluate needs --hyp/--ref and/or --aug/--test")
        write_report(_out(cfg, "evaluation.tsv"), values)
        for k, v in values.items():
            print(f"{k}\t{v:.4f}")
        return values


# -- argument parsing ------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI-style config file")
    common.add_argument("--seed", type=int)
    common.add_argument("--out-dir")
    common.add_argument("--verbose", "-v", action="store_true")
    common.add_argument("--in-domain", help="in-domain pairs file")
    common.add_argument("--pool", help="open-domain pool (text or index file)")
    common.add_argument("--index", help="index file to load, or to create from --pool")
    common.add_argument("--test", help="test pairs file for intrinsic metrics")
    common.add_argument("--n-min", type=int)
    common.add_argument("--n-max", type=int)
    common.add_argument("--max-keywords", type=int)
    common.add_argument("--min-score", type=float)
    common.add_argument("--sigma-plus", type=float)
    common.add_argument("--sigma-minus", type=float)
    common.add_argument("--sigma", type=float)
    common.add_argument("--lambda1", type=float)
    common.add_argument("--lambda2", type=float)
    common.add_argument("--delta", type=int)
    common.add_argument("--max-iters", type=int)
    common.add_argument("--scorer-cmd")
    common.add_argument("--intent-cmd")

    p = argparse.ArgumentParser(prog="mraug", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("extract-keywords", "retrieve", "filter", "annotate", "augment"):
        sub.add_parser(name, parents=[common])
    sp = sub.add_parser("split", parents=[common])
    sp.add_argument("--corpus", help="pairs file to split")
    sp.add_argument("--k-groups", type=int)
    st = sub.add_parser("stats", parents=[common])
    st.add_argument("--train")
    st.add_argument("--test-pairs")
    ev = sub.add_parser("evaluate", parents=[common])
    ev.add_argument("--hyp")
    ev.add_argument("--ref")
    ev.add_argument("--aug")
    return p


_OVERRIDES = {
    "seed": "global.seed", "out_dir": "paths.out_dir", "in_domain": "paths.in_domain",
    "pool": "paths.pool", "index": "paths.index", "test": "paths.test", "corpus": "paths.corpus",
    "n_min": "text.n_min", "n_max": "text.n_max", "max_keywords": "keywords.max_keywords",
    "min_score": "keywords.min_score", "sigma_plus": "filter.sigma_plus",
    "sigma_minus": "filter.sigma_minus", "sigma": "filter.sigma", "lambda1": "filter.lambda1",
    "lambda2": "filter.lambda2", "delta": "filter.delta", "max_iters": "filter.max_iters",
    "scorer_cmd": "filter.scorer_cmd", "intent_cmd": "nlu.intent_cmd", "k_groups": "split.k_groups",
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    opts = vars(args)
    overrides = {dotted: opts.get(name) for name, dotted in _OVERRIDES.items()}
    try:
        cfg = load_config(args.config, overrides)
        if args.command == "extract-keywords":
            cmd_extract_keywords(cfg)
        elif args.command == "retrieve":
            cmd_retrieve(cfg)
        elif args.command == "filter":
            cmd_filter(cfg)
        elif args.command == "annotate":
            cmd_annotate(cfg)
        elif args.command == "augment":
            cmd_augment(cfg)
        elif args.command == "split":
            cmd_split(cfg)
        elif args.command == "stats":
            cmd_stats(cfg, args.train, args.test_pairs)
        elif args.command == "evaluate":
            cmd_evaluate(cfg, args.hyp, args.ref, args.aug, cfg.paths.test)
    except StageError as exc:
        print(f"error in stage '{exc.stage}': {exc.cause}", file=sys.stderr)
        return 1
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
