# -*- coding: utf-8 -*-
# filename: __init__.py
# @Author  : JQQ
# @Email   : jqq1716@gmail.com
# @Software: PyCharm
"""
brtf: Brown-Ravenhall / Thomas-Fermi 数值工具包
brtf: numerical toolkit for the Thomas-Fermi limit of the Brown-Ravenhall atom.
"""

__version__: str = "0.1.0"
