"""
CLI を起動するためのスクリプト（実行ファイルのビルドでもこれをエントリにする）。

通常の起動は `python -m qtoda` でも可能ですが、
このファイルを直接実行した場合でも同じ CLI が動くようにしています。
相対インポートを優先し、失敗時は親ディレクトリを `sys.path` に追加して
`qtoda.cli` を解決できるようにしています。
"""

import sys

try:
    # パッケージ内からの相対 import（推奨ルート）
    from .cli import main  # type: ignore
except Exception:
    # 単体ファイル実行に対応: python qtoda/main.py
    import os
    sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
    from qtoda.cli import main

if __name__ == "__main__":
    sys.exit(main())
