"""
プロジェクト全体のエントリーポイント
python -m src で urlweaver を実行
"""
from .cli.main import main

if __name__ == '__main__':
    main()
