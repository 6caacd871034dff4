import json
from types import SimpleNamespace

import pytest
from hypothesis import HealthCheck, settings

from chronicle.oracle import Oracle
from chronicle.pipeline import build_engine
from chronicle.synth import GeneratorParams, generate_synthetic, write_corpus

settings.register_profile(
    "chronicle",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("chronicle")


def corpus_bundle(root, params: GeneratorParams, seed: int) -> SimpleNamespace:
    """Generate a corpus on disk, run the full pipeline, and wrap the pieces."""
    corpus_dir = root / "corpus"
    corpus = generate_synthetic(params, seed)
    write_corpus(corpus, corpus_dir)
    result = build_engine(corpus_dir)
    engine = result.engine
    oracle = Oracle(
        engine.seq,
        engine.assignments,
        city_name=engine.city_name,
        borough_names=engine.borough_names,
        default_region_kind=engine.default_region_kind,
    )
    manifest = json.loads((corpus_dir / "manifest.json").read_text())
    return SimpleNamespace(
        root=root,
        corpus_dir=corpus_dir,
        params=params,
        seed=seed,
        corpus=corpus,
        result=result,
        engine=engine,
        oracle=oracle,
        manifest=manifest,
    )


@pytest.fixture(scope="session")
def small(tmp_path_factory):
    """A corpus big enough to exercise every code path but quick to build."""
    params = GeneratorParams(
        lots=400,
        releases=6,
        boroughs=2,
        neighborhoods_per_borough=3,
        lots_per_block=16,
    )
    return corpus_bundle(tmp_path_factory.mktemp("small"), params, seed=11)


@pytest.fixture(scope="session")
def desk(tmp_path_factory):
    """The default-size corpus. Expensive; only the acceptance suite asks."""
    return corpus_bundle(tmp_path_factory.mktemp("desk"), GeneratorParams(), seed=0)


@pytest.fixture(scope="session")
def micro(tmp_path_factory):
    """The handwritten five-lot corpus; every aggregate is checkable on paper."""
    from .helpers import write_micro_corpus

    root = write_micro_corpus(tmp_path_factory.mktemp("micro"))
    engine = build_engine(root).engine
    oracle = Oracle(
        engine.seq,
        engine.assignments,
        city_name=engine.city_name,
        borough_names=engine.borough_names,
        default_region_kind=engine.default_region_kind,
    )
    return SimpleNamespace(engine=engine, oracle=oracle, root=root)
