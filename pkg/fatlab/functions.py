import asyncio
import logging
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

from fatlab.exceptions import ClaimExecutionError, ClaimFailureError
from fatlab.presets import PresetLibrary, default_library
from fatlab.registry import ClaimResult, Registry, run_claim
from fatlab.utils import Config

__all__ = (
    "run_claims",
    "evaluate_claims",
    "verify_claims",
    "human_verify_claims",
)

logger = logging.getLogger(__name__)


def _resolve_ids(registry: Registry, claim_ids: Sequence[str]) -> List[str]:
    if not claim_ids or list(claim_ids) == ["all"]:
        return registry.ids()
    for claim_id in claim_ids:
        registry.get(claim_id)
    return list(claim_ids)


async def _run_claim(
    claim_id: str,
    registry: Registry,
    library: PresetLibrary,
    config: Config,
    semaphore: asyncio.Semaphore,
) -> ClaimResult:
    async with semaphore:
        return await asyncio.to_thread(
            run_claim,
            claim_id,
            registry,
            library,
            samples=config.budget_for(claim_id),
            seed=config.seed,
            workers=config.workers,
        )


async def _get_claim_futures(
    claim_ids: Sequence[str],
    registry: Registry,
    library: PresetLibrary,
    config: Config,
) -> List[Union[ClaimResult, BaseException]]:
    semaphore = asyncio.Semaphore(config.workers)
    return await asyncio.gather(
        *[_run_claim(claim_id, registry, library, config, semaphore) for claim_id in claim_ids],
        return_exceptions=True,
    )


async def run_claims(
    *claim_ids: str,
    registry: Optional[Registry] = None,
    library: Optional[PresetLibrary] = None,
    config: Optional[Config] = None,
) -> List[ClaimResult]:
    """Run claims concurrently; results come back in the order the ids were given."""
    registry = registry or Registry.load()
    config = config or Config()
    library = library or default_library(config.presets_dir)
    ids = _resolve_ids(registry, claim_ids)
    logger.debug(f"running {len(ids)} claims on {config.workers} workers")
    results = await _get_claim_futures(ids, registry, library, config)
    failed_claims_dict = {}
    for claim_id, result in zip(ids, results):
        if issubclass(result.__class__, Exception):
            failed_claims_dict[claim_id] = result
    if failed_claims_dict:
        raise ClaimExecutionError(failed_claims_dict=failed_claims_dict)
    return list(results)


async def evaluate_claims(
    *claim_ids: str,
    registry: Optional[Registry] = None,
    library: Optional[PresetLibrary] = None,
    config: Optional[Config] = None,
) -> Tuple[Set[ClaimResult], Set[ClaimResult]]:
    results = await run_claims(*claim_ids, registry=registry, library=library, config=config)
    successful = set()
    failed = set()
    for result in results:
        if result.failed:
            failed.add(result)
        else:
            successful.add(result)
    return successful, failed


async def verify_claims(
    *claim_ids: str,
    registry: Optional[Registry] = None,
    library: Optional[PresetLibrary] = None,
    config: Optional[Config] = None,
) -> Set[ClaimResult]:
    successful, failures = await evaluate_claims(*claim_ids, registry=registry, library=library, config=config)
    if failures:
        raise ClaimFailureError(failed_claims=failures)
    return successful


async def human_verify_claims(
    *claim_groups: Sequence[str],
    registry: Optional[Registry] = None,
    config: Optional[Config] = None,
) -> Dict[int, bool]:
    verdicts = {}
    for group_count, claim_ids in enumerate(claim_groups, start=1):
        try:
            await verify_claims(*claim_ids, registry=registry, config=config)
            print(f"  {group_count}. group reproduced successfully.")
            verdicts[group_count] = True
        except ClaimFailureError as e:
            print(f"  {group_count}. group executed, some claims did not reproduce:", e.failed_claims)
            verdicts[group_count] = False
        except ClaimExecutionError as e:
            print(f"  {group_count}. group failed during execution:", e.failed_claims_dict)
            verdicts[group_count] = False
    return verdicts
