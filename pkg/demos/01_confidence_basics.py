"""What embedding confidence measures, on a corpus small enough to eyeball.

Three replicates of a six-word vocabulary: two words ("port", "ship") keep
the same neighborhood in every replicate, while "bank" oscillates between a
money sense and a river sense. Confidence is the mean overlap of top-k
neighbor sets across every ordered pair of replicates, scaled into [0, 1].
"""

import numpy as np

from termex import ReplicateSet, EmbeddingReplicate, embedding_confidence, knn

# axes: e0 ~ finance, e1 ~ water, e2 ~ shipping
money = np.array([1.0, 0.0, 0.1])
river = np.array([0.0, 1.0, 0.1])

def replicate(index, bank_sense):
    vectors = {
        "loan":   money + [0.00, 0.02, 0.0],
        "credit": money + [0.01, 0.00, 0.0],
        "river":  river + [0.02, 0.00, 0.0],
        "shore":  river + [0.00, 0.01, 0.0],
        "ship":   [0.1, 0.3, 1.0],
        "port":   [0.1, 0.2, 0.9],
        "bank":   bank_sense,
    }
    return EmbeddingReplicate.from_mapping("demo", index, vectors)

replicates = [
    replicate(0, money + [0.0, 0.05, 0.0]),   # bank ~ finance
    replicate(1, river + [0.05, 0.0, 0.0]),   # bank ~ water
    replicate(2, money + [0.02, 0.0, 0.0]),   # bank ~ finance again
]
corpus = ReplicateSet.build("demo", "Demo corpus", 0, replicates)

print("top-2 neighbors of 'bank' in each replicate:")
for rep in corpus.replicates:
    neighbors = knn(rep, "bank", 2, corpus.shared_ids)
    pretty = ", ".join(f"{c} ({s:.3f})" for c, s in neighbors.entries)
    print(f"  replicate {rep.replicate_index}: {pretty}")

print("\nconfidence EC@2 (1.0 = same neighborhood everywhere):")
for concept in corpus.shared_ids:
    ec = embedding_confidence(corpus, concept, 2)
    marker = "high" if ec >= 0.5 else "LOW "
    print(f"  {marker}  {concept:<7} {ec:.3f}")

print(
    "\n'bank' scores low because its replicate neighborhoods disagree, so a\n"
    "downstream analysis should not trust any single replicate's view of it."
)
