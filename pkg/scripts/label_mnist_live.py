#!/usr/bin/env python3
"""Write a ready-to-serve config for a live MNIST 5-vs-7 labeling session.

Point it at IDX files, then start the server and open the console:

    python3 scripts/label_mnist_live.py --train-images train-images-idx3-ubyte \\
        --train-labels train-labels-idx1-ubyte --out mnist_session.cfg
    gaal serve --config mnist_session.cfg --port 8765
    # open frontend/index.html?server=http://127.0.0.1:8765
"""

import argparse
import sys


TEMPLATE = """config_version=1
strategy=gaal
init_size=50
batch_size=10
budget=350
oracle=human
seeds=0
image_shape=28,28
dataset.kind=idx
dataset.train_images={train_images}
dataset.train_labels={train_labels}
dataset.test_images={test_images}
dataset.test_labels={test_labels}
dataset.class_a={class_a}
dataset.class_b={class_b}
gan.epochs=60
gan.batch_size=128
synth.steps=100
synth.restarts=30
svm.regularization=0.001
svm.epochs=2000
"""


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--train-images", required=True)
    parser.add_argument("--train-labels", required=True)
    parser.add_argument("--test-images", required=True)
    parser.add_argument("--test-labels", required=True)
    parser.add_argument("--class-a", type=int, default=5)
    parser.add_argument("--class-b", type=int, default=7)
    parser.add_argument("--out", default="mnist_session.cfg")
    args = parser.parse_args()
    text = TEMPLATE.format(
        train_images=args.train_images,
        train_labels=args.train_labels,
        test_images=args.test_images,
        test_labels=args.test_labels,
        class_a=args.class_a,
        class_b=args.class_b,
    )
    with open(args.out, "w") as fh:
        fh.write(text)
    print(f"wrote {args.out}; start with: gaal serve --config {args.out} --port 8765")
    return 0


if __name__ == "__main__":
    sys.exit(main())
