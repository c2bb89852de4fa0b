"""Command-line entry point: ``qadv <command> [options]``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import attacks, classifier, defense, noise, reports, substitute
from .data import mnist, physics, store
from .dataset import split_indices
from .errors import QadvError

log = logging.getLogger("qadv")


def _ints(text):
    return tuple(int(v) for v in text.split(",") if v.strip())


def _floats(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def resolve(path):
    """Existing path as given, else relative to ``$QADV_DATA_DIR``."""
    p = Path(path)
    if p.exists() or p.is_absolute():
        return p
    root = os.environ.get("QADV_DATA_DIR")
    if root and (Path(root) / p).exists():
        return Path(root) / p
    return p


def _need(path):
    p = resolve(path)
    if not p.exists():
        raise QadvError(f"no such file: {path}")
    return p


def _load_data(path):
    return store.load_dataset(_need(path))


def _load_model(path):
    return classifier.load_model(_need(path))


def _config(args):
    return {k: v for k, v in vars(args).items() if k != "func"}


def _summary(name, ds):
    counts = ", ".join(f"{c}:{n}" for c, n in zip(ds.class_names, ds.class_counts()))
    print(f"{name}: {len(ds)} samples ({counts})")


def _save_splits(out, splits):
    for name, ds in splits.items():
        store.save_dataset(ds, out / f"{name}.blob")
        _summary(name, ds)


# ---------------------------------------------------------------------------
# datagen


def cmd_datagen(args):
    with reports.run_outputs(args.out, f"datagen {args.source}", _config(args), args.seed) as out:
        if args.source == "mnist":
            images, labels = mnist.load_idx(_need(args.images), _need(args.labels))
            test = (None, None)
            if args.test_images:
                test = mnist.load_idx(_need(args.test_images), _need(args.test_labels))
            spec = mnist.SplitSpec(_ints(args.classes), args.train, args.valid,
                                   args.test, args.seed)
            tr, va, te = mnist.build_splits(spec, images, labels, *test)
            _save_splits(out, {"train": tr, "valid": va, "test": te})
            return
        if args.source == "ising":
            jx = physics.ising_jx_grid(args.grid, 0.0, args.jx_max, args.dead_zone,
                                       None if args.even else args.seed)
            ds = physics.generate_ising_dataset(args.L, jx, args.dead_zone)
        else:
            ranges = {"t": _floats(args.t_range), "lam": _floats(args.lam_range),
                      "mu": _floats(args.mu_range)}
            ds = physics.generate_tof(args.count, ranges, args.L, args.seed,
                                      args.gap_margin, args.k_grid)
        sizes = _ints(args.split) if args.split else (len(ds),)
        if sum(sizes) > len(ds):
            raise QadvError(f"split {sizes} needs more than {len(ds)} samples")
        blocks = split_indices(len(ds), list(sizes), np.random.default_rng(args.seed))
        names = ["train", "valid", "test"][: len(blocks)]
        _save_splits(out, {n: ds.subset(b) for n, b in zip(names, blocks)})


# ---------------------------------------------------------------------------
# training and evaluation


def _train_config(args):
    return classifier.TrainConfig(
        learning_rate=args.lr, batch_size=args.batch, epochs=args.epochs,
        seed=args.seed, threads=args.threads, gradient=args.gradient,
    )


def _new_model(args, train_set):
    n_data = classifier.n_data_for(train_set.features.shape[1])
    model = classifier.CircuitModel.random(n_data, train_set.n_classes, args.depth,
                                           seed=args.seed)
    model.metadata.update({"seed": args.seed, "dataset": str(args.train),
                           "class_names": list(train_set.class_names)})
    return model


def cmd_train(args):
    with reports.run_outputs(args.out, "train", _config(args), args.seed) as out:
        tr, va = _load_data(args.train), _load_data(args.valid)
        model = _new_model(args, tr)
        best, records = classifier.train(model, tr, va, _train_config(args))
        classifier.save_model(best, out / "model.json")
        reports.write_records(records, out / "metrics.csv")
        summary = {"best_epoch": best.metadata.get("epoch"),
                   "valid_accuracy": max(r.accuracy for r in records if r.split == "valid")}
        if args.test:
            te = _load_data(args.test)
            loss, acc = classifier.evaluate(best, classifier.encode_dataset(te, best.n_data),
                                            te.labels)
            summary.update(test_loss=loss, test_accuracy=acc)
        reports.write_json(summary, out / "summary.json")
        print(summary)


def cmd_eval(args):
    model, ds = _load_model(args.model), _load_data(args.data)
    loss, acc = classifier.evaluate(model, classifier.encode_dataset(ds, model.n_data),
                                    ds.labels)
    summary = {"loss": loss, "accuracy": acc, "n_samples": len(ds)}
    if args.out:
        with reports.run_outputs(args.out, "eval", _config(args), None) as out:
            reports.write_json(summary, out / "summary.json")
    print(summary)


# ---------------------------------------------------------------------------
# attacks


def _attack_config(args, prefix=""):
    get = lambda name: getattr(args, prefix + name)  # noqa: E731
    method, iters, step, eps = get("method"), get("iters"), get("step"), get("epsilon")
    if method == "fgsm":
        iters = 1
    if eps is None:
        if step is None:
            raise QadvError("give --epsilon, --step, or both")
        eps = iters * step
    return attacks.AttackConfig(
        method=method, epsilon=eps, iterations=iters, step_size=step,
        space=getattr(args, "space", "additive"), target=getattr(args, "target", None),
        mim_decay=getattr(args, "decay", 1.0), pgd_restarts=getattr(args, "restarts", 1),
        domain=getattr(args, "domain", "features"), seed=args.seed,
    )


def cmd_attack(args):
    with reports.run_outputs(args.out, "attack", _config(args), args.seed) as out:
        model, ds = _load_model(args.model), _load_data(args.data)
        if args.limit:
            ds = ds.subset(np.arange(min(args.limit, len(ds))))
        config = _attack_config(args)
        report = attacks.evaluate_attack(model, ds, config, threads=args.threads)
        report.write_csv(out / "attack.csv")
        report.write_json(out / "summary.json")
        print({"accuracy": report.accuracy, "mean_fidelity": report.mean_fidelity})


def cmd_defend(args):
    with reports.run_outputs(args.out, "defend", _config(args), args.seed) as out:
        tr, va = _load_data(args.train), _load_data(args.valid)
        model = _load_model(args.model) if args.model else _new_model(args, tr)
        inner = _attack_config(args, "inner_")
        cfg = defense.DefenseConfig(inner, _train_config(args), args.mix, args.refresh)
        adv_test = _load_data(args.test) if args.test else None
        hardened, records = defense.adversarial_train(model, tr, va, cfg, adv_test)
        classifier.save_model(hardened, out / "model.json")
        reports.write_records(records, out / "metrics.csv", ("adv_loss", "adv_accuracy"))
        last = records[-1]
        print({"valid_accuracy": last.accuracy, **last.extra})


def cmd_noise(args):
    with reports.run_outputs(args.out, "noise", _config(args), args.seed) as out:
        model, ds = _load_model(args.model), _load_data(args.data)
        if args.limit:
            ds = ds.subset(np.arange(min(args.limit, len(ds))))
        grid = noise.parse_grid(args.beta_grid)
        points = noise.noise_sweep(model, ds, grid, args.trajectories, args.seed)
        noise.write_curve(points, out / "noise.csv")
        for p in points:
            print(f"beta={p.beta:.3f} F={p.mean_fidelity:.4f} acc={p.mean_accuracy:.4f}")


def cmd_transfer(args):
    with reports.run_outputs(args.out, "transfer", _config(args), args.seed) as out:
        victim, ds = _load_model(args.victim), _load_data(args.data)
        if args.substitute:
            mlp = substitute.load_mlp(_need(args.substitute))
        else:
            if not args.train:
                raise QadvError("give --substitute or --train to fit one")
            tr = _load_data(args.train)
            sizes = (tr.features.shape[1], 512, 53, tr.n_classes)
            mlp = substitute.MLPModel.init(sizes, seed=args.seed)
            mlp, history = substitute.mlp_train(
                mlp, tr, substitute.MLPTrainConfig(epochs=args.mlp_epochs, seed=args.seed))
            substitute.save_mlp(mlp, out / "substitute.json")
        sub_acc = float(np.mean(mlp.predict(ds.features)[0] == ds.labels))
        report, drop = substitute.transfer_attack(mlp, victim, ds, _attack_config(args))
        report.write_csv(out / "transfer.csv")
        reports.write_json({**report.summary(), **drop, "substitute_accuracy": sub_acc},
                           out / "summary.json")
        print({**drop, "substitute_accuracy": sub_acc})


# ---------------------------------------------------------------------------
# parser


def _add_train_flags(p):
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--lr", type=float, default=0.005)
    p.add_argument("--batch", type=int, default=256)
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--gradient", choices=("adjoint", "shift"), default="adjoint")


def _add_attack_flags(p, prefix="", default_method="bim"):
    flag = f"--{prefix.replace('_', '-')}"
    p.add_argument(f"{flag}method", dest=f"{prefix}method", default=default_method,
                   choices=attacks.METHODS)
    p.add_argument(f"{flag}iters", dest=f"{prefix}iters", type=int, default=3)
    p.add_argument(f"{flag}step", dest=f"{prefix}step", type=float, default=None,
                   help="step size per iteration (default: epsilon / iters)")
    p.add_argument(f"{flag}epsilon", dest=f"{prefix}epsilon", type=float, default=None,
                   help="perturbation bound (default: iters * step)")


def build_parser():
    parser = argparse.ArgumentParser(prog="qadv", description=__doc__)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("datagen", help="build dataset blobs")
    p.add_argument("source", choices=("mnist", "ising", "qah"))
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--images")
    p.add_argument("--labels")
    p.add_argument("--test-images")
    p.add_argument("--test-labels")
    p.add_argument("--classes", default="1,9")
    p.add_argument("--train", type=int, default=11633)
    p.add_argument("--valid", type=int, default=1058)
    p.add_argument("--test", type=int, default=None)
    p.add_argument("--L", type=int, default=None)
    p.add_argument("--grid", type=int, default=1577)
    p.add_argument("--even", action="store_true", help="evenly spaced J_x grid")
    p.add_argument("--jx-max", type=float, default=2.0)
    p.add_argument("--dead-zone", type=float, default=0.02)
    p.add_argument("--count", type=int, default=1200)
    p.add_argument("--t-range", default="0.05,0.5")
    p.add_argument("--lam-range", default="0.2,1.0")
    p.add_argument("--mu-range", default="1.0,1.0")
    p.add_argument("--gap-margin", type=float, default=0.2)
    p.add_argument("--k-grid", type=int, default=24)
    p.add_argument("--split", default=None, help="comma-separated train,valid[,test] sizes")
    p.set_defaults(func=cmd_datagen)

    p = sub.add_parser("train", help="train a circuit classifier")
    p.add_argument("--train", required=True)
    p.add_argument("--valid", required=True)
    p.add_argument("--test")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    _add_train_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="loss and accuracy of a checkpoint")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("attack", help="white-box or zeroth-order attack")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    _add_attack_flags(p)
    p.add_argument("--space", choices=attacks.SPACES, default="additive")
    p.add_argument("--domain", choices=attacks.DOMAINS, default="features")
    p.add_argument("--target", type=int, default=None, help="target class index")
    p.add_argument("--decay", type=float, default=1.0)
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--limit", type=int, default=None)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("defend", help="adversarial training")
    p.add_argument("--train", required=True)
    p.add_argument("--valid", required=True)
    p.add_argument("--test")
    p.add_argument("--model", help="start from this checkpoint instead of random")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    _add_train_flags(p)
    _add_attack_flags(p, "inner_")
    p.add_argument("--mix", type=float, default=0.5)
    p.add_argument("--refresh", choices=("epoch", "step"), default="epoch")
    p.set_defaults(func=cmd_defend, inner_step=0.05)

    p = sub.add_parser("noise", help="depolarizing-noise sweep")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--beta-grid", default="0:0.3:0.02")
    p.add_argument("--trajectories", type=int, default=1000)
    p.add_argument("--limit", type=int, default=None)
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("transfer", help="black-box transfer attack via an MLP substitute")
    p.add_argument("--victim", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--substitute")
    p.add_argument("--train", help="dataset to fit a substitute on")
    p.add_argument("--mlp-epochs", type=int, default=30)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    _add_attack_flags(p, default_method="fgsm")
    p.add_argument("--decay", type=float, default=1.0)
    p.set_defaults(func=cmd_transfer)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "datagen":
        if args.source == "mnist" and not (args.images and args.labels):
            parser.error("datagen mnist needs --images and --labels")
        if args.L is None:
            args.L = 8 if args.source == "ising" else 10
    try:
        args.func(args)
    except QadvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
