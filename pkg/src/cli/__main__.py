"""
python -m src.cli で実行された場合のエントリーポイント
"""
from .main import main

if __name__ == '__main__':
    main()
